#pragma once

#include "symphonic/config.hpp"
#include "symphonic/errors.hpp"
#include "symphonic/euler_lagrange.hpp"
#include "symphonic/functional.hpp"
#include "symphonic/geometry.hpp"
#include "symphonic/grid.hpp"
#include "symphonic/io.hpp"
#include "symphonic/shooting.hpp"
#include "symphonic/solver.hpp"
