// Copyright 2026 The BNF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "bnf/errors.hpp"
#include "bnf/run_config.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <fstream>

using namespace bnf;

TEST_CASE("config text parsing") {
    RunConfig c;
    c.load_text("# solver\nmu = 0.05\n\n  radius=7  # inline\nuse_softmax_term = false\nseed = 18446744073709551615\n");
    CHECK(c.mu == 0.05);
    CHECK(c.radius == 7);
    CHECK(!c.use_softmax_term);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.solve().mu == 0.05);
    CHECK(c.affinity().radius == 7);
    CHECK(c.scene(3).seed == 3);
}

TEST_CASE("config errors carry the line") {
    RunConfig c;
    try {
        c.load_text("mu = 0.1\nbogus = 1\n", "f.cfg");
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("f.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(c.set("radius", "3.5"), ValidationError);
    CHECK_THROWS_AS(c.set("mu", "abc"), ValidationError);
    CHECK_THROWS_AS(c.load_text("novalue\n"), ValidationError);
    CHECK_THROWS_AS(c.load_file("/nonexistent/x.cfg"), ValidationError);
}

TEST_CASE("every key is settable from a file") {
    const auto dir = testing::temp_dir("config");
    {
        std::ofstream os(dir / "c.cfg");
        os << "epochs = 3\nlr = 0.1\nbatch = 8\nsamples = 64\nfit_bias = no\nthreads = 2\n";
    }
    RunConfig c;
    c.load_file(dir / "c.cfg");
    CHECK(c.train().epochs == 3);
    CHECK(c.train().learning_rate == 0.1);
    CHECK(c.train().batch_size == 8);
    CHECK(c.samples == 64);
    CHECK(!c.train().fit_bias);
    CHECK(c.threads == 2);
    CHECK(RunConfig::keys().size() == 25);
}
