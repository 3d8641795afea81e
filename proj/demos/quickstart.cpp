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

// Covariant quickstart: the two-qubit Bell construction gives a kernel equal
// to the class indicator, so a multiclass SVC separates the classes exactly.
// Then alignment finds a comparable fiducial state from a random start.

#include <cstdio>
#include <numbers>

#include "qkbft.hpp"

int main() {
    using namespace qkbft;

    const auto ds = theory::bell_dataset(20, 7);
    const auto s = split(ds, 0.5, 8);
    const auto fmap = theory::bell_feature_map();

    KernelConfig exact;
    exact.shots = 0;
    const auto known = theory::bell_fiducial_parameters();
    const MatrixXd k_train = repair(assemble_matrix(s.train.features, fmap, known, exact)).values;
    const MatrixXd k_test = assemble_cross_matrix(s.test.features, s.train.features, fmap, known, exact);
    const auto model = fit_multiclass(k_train, s.train.labels);
    std::printf("known fiducial: train %.2f  test %.2f\n", accuracy(predict(model, k_train), s.train.labels),
                accuracy(predict(model, k_test), s.test.labels));

    SPSAConfig spsa;
    spsa.a = 1.0;
    spsa.c = 0.2;
    spsa.seed = 3;
    AlignOptions start;
    start.init_seed = 3;
    start.init_spread = std::numbers::pi;
    const auto trace = align_kernel(s.train.features, s.train.labels, fmap, spsa, exact, {}, start);
    std::printf("alignment loss %.4f -> %.4f over %d iterations (%zu kernel evaluations)\n",
                trace.entries.front().loss, trace.final_loss(), spsa.iterations, trace.evaluations);

    // same pipeline with 2000 shots per circuit
    KernelConfig sampled;
    sampled.shots = 2000;
    sampled.master_seed = 11;
    const auto &learned = trace.entries.back().lambda;
    const auto est = repair(assemble_matrix(s.train.features, fmap, learned, sampled));
    const auto noisy = fit_multiclass(est.values, s.train.labels);
    const MatrixXd k_cross = assemble_cross_matrix(s.test.features, s.train.features, fmap, learned, sampled);
    std::printf("learned fiducial, 2000 shots: test %.2f  (PSD repair %s)\n",
                accuracy(predict(noisy, k_cross), s.test.labels), est.psd_projected ? "applied" : "not needed");
    return 0;
}
