// SPDX-License-Identifier: Apache-2.0
//
// leoce - channel estimation toolkit for LEO satellite massive MIMO OFDM uplinks
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "leoce/common.hpp"
#include "leoce/random.hpp"
#include "leoce/fft.hpp"
#include "leoce/satgeo.hpp"
#include "leoce/channel.hpp"
#include "leoce/pilots.hpp"
#include "leoce/toeplitz.hpp"
#include "leoce/transforms.hpp"
#include "leoce/problem.hpp"
#include "leoce/mmse.hpp"
#include "leoce/references.hpp"
#include "leoce/tsce.hpp"
#include "leoce/config.hpp"
#include "leoce/experiments.hpp"
