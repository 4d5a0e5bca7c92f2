#pragma once

// Umbrella header for the whole toolkit.

#include "thd/classifier.hpp"
#include "thd/clustering.hpp"
#include "thd/config.hpp"
#include "thd/cover.hpp"
#include "thd/csv.hpp"
#include "thd/dataset.hpp"
#include "thd/geometry.hpp"
#include "thd/mapper.hpp"
#include "thd/network.hpp"
#include "thd/pipeline.hpp"
#include "thd/report.hpp"
#include "thd/stats.hpp"
#include "thd/thd.hpp"
#include "thd/types.hpp"
