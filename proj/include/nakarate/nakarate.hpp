// SPDX-License-Identifier: Apache-2.0
//
// nakarate: rate outage probability of OFDMA links over Nakagami-m channels
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


#ifndef NAKARATE_NAKARATE_HPP
#define NAKARATE_NAKARATE_HPP

#include "nakarate/error.hpp"
#include "nakarate/specfun.hpp"
#include "nakarate/channel.hpp"
#include "nakarate/outage.hpp"
#include "nakarate/laplace.hpp"
#include "nakarate/mcsim.hpp"
#include "nakarate/ratestats.hpp"
#include "nakarate/allocator.hpp"

#endif
