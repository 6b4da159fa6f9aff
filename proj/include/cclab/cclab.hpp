#pragma once

#include "cclab/error.hpp"
#include "cclab/ndarray.hpp"
#include "cclab/jacobi.hpp"
#include "cclab/lambda2.hpp"
#include "cclab/lie.hpp"
#include "cclab/submersion.hpp"
#include "cclab/double_fibration.hpp"
#include "cclab/families.hpp"
#include "cclab/fixtures.hpp"
#include "cclab/io.hpp"
#include "cclab/commands.hpp"
