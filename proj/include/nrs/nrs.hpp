// Copyright 2026 The nrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NRS_NRS_HPP
#define NRS_NRS_HPP

#include "error.hpp"
#include "experiment.hpp"
#include "fft.hpp"
#include "fsr.hpp"
#include "grid.hpp"
#include "merge.hpp"
#include "metrics.hpp"
#include "motion.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "sampling.hpp"
#include "video_io.hpp"

#endif
