#pragma once

#include "commentqc/models/model.hpp"
#include "commentqc/models/spec.hpp"
