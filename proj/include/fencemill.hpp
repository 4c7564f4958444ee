#pragma once
/**
 * @file   fencemill.hpp
 * @brief  Core library: shapes, dynamics, channel, behaviors, metrics, scenario engine.
 *
 * File formats (YAML configs, run-log directories, JSON reports) live under
 * fencemill/io/ and need yaml-cpp.
 */

#include "fencemill/angles.hpp"
#include "fencemill/behaviors.hpp"
#include "fencemill/campaign.hpp"
#include "fencemill/channel.hpp"
#include "fencemill/dynamics.hpp"
#include "fencemill/estimator.hpp"
#include "fencemill/metrics.hpp"
#include "fencemill/replay.hpp"
#include "fencemill/report.hpp"
#include "fencemill/scenario.hpp"
#include "fencemill/shapes.hpp"
