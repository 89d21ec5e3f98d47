#pragma once

#include "sqfr/dataset.hpp"
#include "sqfr/errors.hpp"
#include "sqfr/fairness.hpp"
#include "sqfr/report.hpp"
#include "sqfr/scenario.hpp"
