#pragma once

#include "amdl/active_dd.hpp"
#include "amdl/complexity.hpp"
#include "amdl/config.hpp"
#include "amdl/core.hpp"
#include "amdl/error.hpp"
#include "amdl/harness.hpp"
#include "amdl/hedge.hpp"
#include "amdl/instance_io.hpp"
#include "amdl/instances.hpp"
#include "amdl/oracle.hpp"
#include "amdl/rng.hpp"
#include "amdl/rpu.hpp"
#include "amdl/stats.hpp"
