// Copyright 2026 The ogrebench Authors
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

#include "ogre/sched/kind.hpp"

namespace ogre::sched {

std::string_view scheduler_name(SchedulerKind kind) noexcept {
  switch (kind) {
    case SchedulerKind::centralized:
      return "centralized";
    case SchedulerKind::multilevel:
      return "multilevel";
    case SchedulerKind::decentral:
      return "decentral";
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept {
  for (auto k : {SchedulerKind::centralized, SchedulerKind::multilevel, SchedulerKind::decentral}) {
    if (scheduler_name(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace ogre::sched
