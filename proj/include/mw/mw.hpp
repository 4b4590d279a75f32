#pragma once

#include "mw/chain.hpp"
#include "mw/complexity.hpp"
#include "mw/divergences.hpp"
#include "mw/error.hpp"
#include "mw/montecarlo.hpp"
#include "mw/pi_geometry.hpp"
#include "mw/spectral.hpp"
#include "mw/zoo.hpp"
