/*
 * Copyright 2026 the urbanlinq authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef URBANLINQ_URBANLINQ_HPP
#define URBANLINQ_URBANLINQ_HPP

#include "backprop.hpp"
#include "channel.hpp"
#include "citymap.hpp"
#include "common.hpp"
#include "dataset.hpp"
#include "embed.hpp"
#include "evalharness.hpp"
#include "fileio.hpp"
#include "linkgraph.hpp"
#include "mat.hpp"
#include "pathloss.hpp"
#include "quantizer.hpp"
#include "radiomap.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "schedule.hpp"
#include "solvers.hpp"
#include "threadpool.hpp"
#include "train.hpp"

#endif
