#pragma once

#include "hqec/analysis.hpp"
#include "hqec/code.hpp"
#include "hqec/concat.hpp"
#include "hqec/errors.hpp"
#include "hqec/experiments.hpp"
#include "hqec/liouville.hpp"
#include "hqec/metrology.hpp"
#include "hqec/propagate.hpp"
#include "hqec/spaces.hpp"
