#pragma once

#include "uavtb/channel.hpp"
#include "uavtb/config.hpp"
#include "uavtb/geometry.hpp"
#include "uavtb/harness.hpp"
#include "uavtb/milp.hpp"
#include "uavtb/oracles.hpp"
#include "uavtb/placement.hpp"
#include "uavtb/power.hpp"
#include "uavtb/rate.hpp"
#include "uavtb/rng.hpp"
#include "uavtb/scenario.hpp"
#include "uavtb/simplex.hpp"
