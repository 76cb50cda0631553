#pragma once

#include "error.hpp"
#include "word.hpp"
#include "linalg.hpp"
#include "series.hpp"
#include "eval.hpp"
#include "expr.hpp"
#include "calculus.hpp"
#include "middle.hpp"
#include "realization.hpp"
#include "transform.hpp"
#include "monodromy.hpp"
#include "json_io.hpp"
