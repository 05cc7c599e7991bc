#pragma once

#include "tpq/bench.hpp"
#include "tpq/binjoin.hpp"
#include "tpq/cost.hpp"
#include "tpq/decompose.hpp"
#include "tpq/exec.hpp"
#include "tpq/gendoc.hpp"
#include "tpq/holjoin.hpp"
#include "tpq/index.hpp"
#include "tpq/labels.hpp"
#include "tpq/optimality.hpp"
#include "tpq/oracle.hpp"
#include "tpq/plan.hpp"
#include "tpq/query.hpp"
#include "tpq/stats.hpp"
#include "tpq/stream.hpp"
