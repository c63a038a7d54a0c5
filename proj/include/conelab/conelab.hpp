#pragma once

#include "conelab/core.hpp"
#include "conelab/oracle.hpp"
#include "conelab/cones.hpp"
#include "conelab/retractions.hpp"
#include "conelab/report.hpp"
#include "conelab/suprema.hpp"
#include "conelab/properties.hpp"
#include "conelab/io.hpp"
