// Copyright 2026 The darkfilter Authors
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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "darkfilter/experiments.hpp"
#include "darkfilter/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw darkfilter::ValidationError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace darkfilter;

    CLI::App app{"Filtration of dark states in periodically kicked spin chains"};
    app.set_version_flag("--version", std::string(kVersion));
    std::string command_name;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string engine;
    bool verbose = false;

    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command_name, "one of: " + names)->required();
    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--seed", seed, "override the RNG seed");
    app.add_option("--engine", engine, "propagation engine")->check(CLI::IsMember({"full", "tower"}));
    app.add_flag("-v,--verbose", verbose, "print check details");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    }

    try {
        const auto command = command_from_string(command_name);
        if (!command) throw ValidationError("unknown command '" + command_name + "' (expected one of: " + names + ")");
        ExperimentSpec spec = parse_config(slurp(config_path));
        if (seed) {
            spec.seed = *seed;
            if (spec.goe) spec.goe->seed = *seed;
        }
        if (!engine.empty()) spec.engine = engine == "full" ? Engine::full : Engine::tower;
        validate_spec(spec);

        const RunArtifacts art = run_experiment(*command, spec, out_dir);
        for (const auto& c : art.checks) {
            if (verbose || !c.passed) {
                std::cerr << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  [" + c.detail + "]")
                          << "\n";
            }
        }
        std::cerr << to_string(*command) << ": " << art.files.size() << " files in " << art.directory.string() << " ("
                  << art.wall_seconds << " s)\n";
        return art.ok() ? kExitOk : kExitNumerical;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
