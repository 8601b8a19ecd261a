// Copyright 2026 The sqzt Authors
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

#ifndef SQZT_CLI_HPP_
#define SQZT_CLI_HPP_

// Command-line driver. Subcommands: simulate, gen-corpus, reconstruct-mle,
// train, reconstruct-nn, evaluate, wigner, fit-degradation, compare.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
// Every run writes a manifest (command, configuration, seed, inputs,
// outputs, version, wall time); deterministic commands are bit-reproducible
// from their manifests.

namespace sqzt::cli {

int run(int argc, const char *const *argv);

}  // namespace sqzt::cli

#endif  // SQZT_CLI_HPP_
