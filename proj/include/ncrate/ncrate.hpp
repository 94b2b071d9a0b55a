#pragma once

#include "ncrate/analytic.hpp"
#include "ncrate/gf.hpp"
#include "ncrate/linalg.hpp"
#include "ncrate/montecarlo.hpp"
#include "ncrate/network.hpp"
#include "ncrate/optimizer.hpp"
#include "ncrate/rateanalysis.hpp"
#include "ncrate/schemes.hpp"
