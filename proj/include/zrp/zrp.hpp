#pragma once

#include "zrp/configuration.hpp"
#include "zrp/ensemble.hpp"
#include "zrp/error.hpp"
#include "zrp/kinetics.hpp"
#include "zrp/limits.hpp"
#include "zrp/logmath.hpp"
#include "zrp/model.hpp"
#include "zrp/observables.hpp"
#include "zrp/partition.hpp"
#include "zrp/rng.hpp"
