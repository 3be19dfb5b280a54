#pragma once

#include "ringwell/exact.hpp"
#include "ringwell/model.hpp"
#include "ringwell/numerics.hpp"
#include "ringwell/sf.hpp"
#include "ringwell/si.hpp"
#include "ringwell/sweep.hpp"
#include "ringwell/validate.hpp"
#include "ringwell/version.hpp"
