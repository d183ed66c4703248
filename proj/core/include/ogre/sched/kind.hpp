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

#pragma once

#include <optional>
#include <string_view>

namespace ogre::sched {

enum class SchedulerKind { centralized, multilevel, decentral };

std::string_view scheduler_name(SchedulerKind kind) noexcept;
std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept;

}  // namespace ogre::sched
