#pragma once
// Umbrella header for the whole library.

#include "forge/base.hpp"
#include "forge/compile.hpp"
#include "forge/errors.hpp"
#include "forge/eval.hpp"
#include "forge/formula.hpp"
#include "forge/grid.hpp"
#include "forge/pattern.hpp"
#include "forge/radix.hpp"
#include "forge/tm.hpp"
