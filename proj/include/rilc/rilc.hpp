#pragma once

#include "rilc/types.hpp"
#include "rilc/polynomial.hpp"
#include "rilc/lti.hpp"
#include "rilc/factorization.hpp"
#include "rilc/laws.hpp"
#include "rilc/sbt_analysis.hpp"
#include "rilc/simulator.hpp"
