#pragma once

#include "stsm/analysis.hpp"
#include "stsm/artifact.hpp"
#include "stsm/bench.hpp"
#include "stsm/biphoton.hpp"
#include "stsm/config.hpp"
#include "stsm/correlation.hpp"
#include "stsm/dispersion.hpp"
#include "stsm/errors.hpp"
#include "stsm/grid.hpp"
#include "stsm/highgain.hpp"
#include "stsm/mode_metrics.hpp"
#include "stsm/model.hpp"
#include "stsm/oracle.hpp"
#include "stsm/run.hpp"
#include "stsm/schmidt.hpp"
