#pragma once

#include "zitter/core.hpp"
#include "zitter/corpus.hpp"
#include "zitter/discriminate.hpp"
#include "zitter/errors.hpp"
#include "zitter/formula.hpp"
#include "zitter/qtp.hpp"
#include "zitter/querymodel.hpp"
#include "zitter/rng.hpp"
#include "zitter/version.hpp"
