#pragma once

#include "wlab/density_lab.hpp"
#include "wlab/errors.hpp"
#include "wlab/io.hpp"
#include "wlab/prime_engine.hpp"
#include "wlab/series_lab.hpp"
#include "wlab/w_core.hpp"
#include "wlab/zeta.hpp"
