#pragma once

#include "treeshift/approx.hpp"
#include "treeshift/consistency.hpp"
#include "treeshift/error.hpp"
#include "treeshift/measure.hpp"
#include "treeshift/models.hpp"
#include "treeshift/moments.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/vertex.hpp"
