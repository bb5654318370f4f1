#pragma once

#include "etsl/checkpoint.hpp"
#include "etsl/common.hpp"
#include "etsl/graph.hpp"
#include "etsl/landmark.hpp"
#include "etsl/metrics.hpp"
#include "etsl/model.hpp"
#include "etsl/nn.hpp"
#include "etsl/normalize.hpp"
#include "etsl/pipeline.hpp"
#include "etsl/runconfig.hpp"
#include "etsl/stats.hpp"
#include "etsl/synth.hpp"
#include "etsl/topology.hpp"
#include "etsl/train.hpp"
#include "etsl/transformer.hpp"
#include "etsl/vocab.hpp"
