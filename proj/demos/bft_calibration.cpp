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

// Bit-flip tolerance under readout noise: calibrate d on circuits equivalent
// to the identity, then compare SVC accuracy on flip-code data across d.
// Every d is read off the same sampled outcome histograms.

#include <cstdio>

#include "qkbft.hpp"

int main() {
    using namespace qkbft;

    sim::NoiseModel noise;
    noise.p01 = 0.03;
    constexpr int n = 12;
    constexpr std::uint64_t shots = 10'000;

    CalibrationOptions cal;
    cal.ns = {4, 8, n};
    cal.noise = noise;
    cal.shots = shots;
    cal.thresholds = {0.9, 0.99};
    cal.seed = 1;
    const auto report = calibrate(cal);
    std::printf("   n  d  avg_diagonal  psd_distance\n");
    for (const auto &p : report.points) {
        if (p.d <= 4) {
            std::printf("%4d %2d  %12.4f  %12.4f\n", p.n, p.d, p.avg_diagonal, p.psd_distance);
        }
    }
    for (const auto &r : report.recommendations) {
        std::printf("n=%d threshold %.2f -> d=%d\n", r.n, r.threshold, r.recommended_d);
    }

    FlipCodeSpec codes;
    codes.n_bits = n;
    codes.samples_per_class = 10;
    codes.seed = 2;
    const auto s = split(gen_flip_codes(codes), 0.5, 3);
    const auto fmap = FeatureMapSpec::on_line(n);
    const std::vector<double> lambda(fmap.parameter_count(), 0.0);
    KernelConfig kcfg;
    kcfg.shots = shots;
    kcfg.master_seed = 4;
    const auto train = assemble_profiles(s.train.features, fmap, lambda, kcfg, noise);
    const auto cross = assemble_cross_profiles(s.test.features, s.train.features, fmap, lambda, kcfg, noise);

    std::printf("\n d  test accuracy\n");
    for (int d = 0; d <= 4; ++d) {
        KernelMatrixEstimate est;
        est.raw = train.matrix(d);
        est.values = est.raw;
        est.d = d;
        const auto model = fit_multiclass(repair(est).values, s.train.labels);
        std::printf("%2d  %.2f\n", d, accuracy(predict(model, cross.matrix(d)), s.test.labels));
    }
    return 0;
}
