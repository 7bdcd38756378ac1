// Copyright 2026 The leakstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef LEAKSTACK_TOOLS_COMMANDS_HPP
#define LEAKSTACK_TOOLS_COMMANDS_HPP

namespace leakstack::cli {

/// Parses argv and runs one subcommand. Exit codes: 0 success, 2 usage
/// error, 3 config or invariant error, 4 numerical failure.
int run(int argc, char **argv);

}  // namespace leakstack::cli

#endif  // LEAKSTACK_TOOLS_COMMANDS_HPP
