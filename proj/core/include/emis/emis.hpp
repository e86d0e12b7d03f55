#pragma once

#include "emis/amplitude.hpp"
#include "emis/born.hpp"
#include "emis/dataset.hpp"
#include "emis/error.hpp"
#include "emis/forward.hpp"
#include "emis/geometry.hpp"
#include "emis/inversion.hpp"
#include "emis/medium.hpp"
#include "emis/parallel.hpp"
#include "emis/types.hpp"
