// Copyright 2026 The qkbft Authors
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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include "pipeline.hpp"

int main(int argc, char **argv) {
    using namespace qkbft::cli;

    CLI::App app{"Bit-flip tolerant quantum kernels: data, calibration, alignment and SVC"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", std::string(qkbft::kVersion));

    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON run configuration merged over the defaults")
        ->check(CLI::ExistingFile);
    bool show_config = false;
    app.add_flag("--print-config", show_config, "print the resolved configuration and exit");

    auto *datagen = app.add_subcommand("datagen", "generate or load a dataset and split it");
    auto *calibrate = app.add_subcommand("calibrate", "sweep d on random feature maps under noise");
    auto *align = app.add_subcommand("align", "optimize the fiducial parameters by SPSA");
    bool resume = false;
    align->add_flag("--resume", resume, "continue from the last entry of trace.csv");
    auto *fit = app.add_subcommand("fit", "train the quantum and/or classical SVC");
    auto *predict = app.add_subcommand("predict", "score the test split with the fitted models");
    auto *verify = app.add_subcommand("verify", "numerical checks of the supporting theory");
    bool strict = false;
    bool convention_bug = false;
    verify->add_flag("--strict", strict, "exit with status 6 when a check fails");
    verify->add_flag("--inject-convention-bug", convention_bug,
                     "use a wrong angle factor in the closed-form kernel (negative control)");
    auto *report = app.add_subcommand("report", "geometric difference against tuned RBF kernels");
    // subcommands accept the global options after their name too
    for (auto *sub : app.get_subcommands({})) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto cfg = resolve_config(config_path.empty() ? std::nullopt
                                                            : std::optional<std::string>(config_path));
        if (show_config) {
            std::cout << cfg.dump(2) << '\n';
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        }
        if (datagen->parsed()) {
            return cmd_datagen(cfg);
        }
        if (calibrate->parsed()) {
            return cmd_calibrate(cfg);
        }
        if (align->parsed()) {
            return cmd_align(cfg, resume);
        }
        if (fit->parsed()) {
            return cmd_fit(cfg);
        }
        if (predict->parsed()) {
            return cmd_predict(cfg);
        }
        if (verify->parsed()) {
            return cmd_verify(cfg, strict, convention_bug);
        }
        if (report->parsed()) {
            return cmd_report(cfg);
        }
    } catch (const qkbft::Error &e) {
        std::cerr << "qkbft: " << qkbft::to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "qkbft: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
