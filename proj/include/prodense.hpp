#pragma once

// Umbrella header for the prodense library.

#include "prodense/bitvector.hpp"
#include "prodense/bounds.hpp"
#include "prodense/correlation.hpp"
#include "prodense/errors.hpp"
#include "prodense/exact.hpp"
#include "prodense/extraction.hpp"
#include "prodense/family.hpp"
#include "prodense/grid.hpp"
#include "prodense/limits.hpp"
#include "prodense/workbench.hpp"
