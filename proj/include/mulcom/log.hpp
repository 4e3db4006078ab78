/*
 * Copyright 2026 The MulCom Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string_view>

namespace mulcom {

enum class LogLevel { kQuiet, kWarning, kInfo };

void set_log_level(LogLevel level);
LogLevel log_level();

// Diagnostics go to stderr; artifacts never do.
void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace mulcom
