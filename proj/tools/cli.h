// Copyright 2026 The MLIC Codec Authors. All Rights Reserved.
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

// Command-line front end. Exit codes: 0 ok, 1 other failure, 2 usage,
// 3 format (also shape and manifest), 4 decode integrity. Failures print
// "error[<class>]: <message>" on stderr.

#ifndef MLIC_TOOLS_CLI_H_
#define MLIC_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace mlic::cli {

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int Run(int argc, char** argv);

}  // namespace mlic::cli

#endif  // MLIC_TOOLS_CLI_H_
