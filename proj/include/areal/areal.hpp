#pragma once

#include "areal/bigint.hpp"
#include "areal/census.hpp"
#include "areal/configs.hpp"
#include "areal/constructions.hpp"
#include "areal/error.hpp"
#include "areal/harness.hpp"
#include "areal/json_io.hpp"
#include "areal/linalg2.hpp"
#include "areal/parallel.hpp"
#include "areal/point_set.hpp"
#include "areal/ring.hpp"
