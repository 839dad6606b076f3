// Copyright 2026 The jim Authors.
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

#ifndef JIM_TOOLS_CLI_H_
#define JIM_TOOLS_CLI_H_

namespace jim::cli {

// Entry point of the jim executable. Returns the process exit code:
// 0 on success, 1 on runtime failure, 2 on invalid configuration.
int Run(int argc, char** argv);

}  // namespace jim::cli

#endif  // JIM_TOOLS_CLI_H_
