#include <gtest/gtest.h>

#include <clocale>
#include <filesystem>
#include <fstream>

#include "fusionlab/errors.hpp"
#include "fusionlab/io.hpp"
#include "fusionlab/verify.hpp"

using namespace fusionlab;

TEST(io, format_number_is_twelve_digits) {
    EXPECT_EQ(format_number(0.125), "0.125");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_DOUBLE_EQ(round12(2.0 / 3.0), 0.666666666667);
}

TEST(io, format_number_ignores_locale) {
    const char *prev = std::setlocale(LC_NUMERIC, nullptr);
    std::string saved = prev ? prev : "C";
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
        EXPECT_EQ(format_number(0.5), "0.5");
    }
    std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(io, matrix_round_trip) {
    Rng rng(3);
    FusionMatrix u = haar_sample(rng);
    FusionMatrix v = matrix_from_json(Json::parse(matrix_to_json(u).dump()));
    EXPECT_LE((u.matrix() - v.matrix()).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(io, matrix_errors) {
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"m": []})")), MalformedInput);
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"matrix": [[[1, 0]]]})")), MalformedInput);
    EXPECT_THROW(matrix_from_json(Json::parse(R"({"matrix": [[1, 2, 3, 4]]})")), MalformedInput);
    Json bad = matrix_to_json(builtin_matrix("identity"));
    bad["matrix"][0][0] = Json::array({1.01, 0.0});
    EXPECT_THROW(matrix_from_json(bad), NotUnitary);
    EXPECT_THROW(resolve_matrix("no-such-file.json"), MalformedInput);
    EXPECT_EQ(resolve_matrix("pbs2").matrix(), builtin_matrix("pbs2").matrix());
}

TEST(io, atomic_write_and_read_back) {
    auto dir = std::filesystem::temp_directory_path() / "fusionlab_io_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "m.json";
    write_file_atomic(path, matrix_to_json(builtin_matrix("theorem7")).dump());
    EXPECT_FALSE(std::filesystem::exists(dir / "m.json.tmp"));
    FusionMatrix u = read_matrix_file(path);
    EXPECT_LE((u.matrix() - builtin_matrix("theorem7").matrix()).cwiseAbs().maxCoeff(), 1e-11);
    std::filesystem::remove_all(dir);
}

TEST(io, analysis_report_pbs2) {
    Json r = analysis_report(builtin_matrix("pbs2"), NeighborArity::One);
    EXPECT_EQ(r["outcomes"].size(), 10u);
    EXPECT_DOUBLE_EQ(r["total_relevant_probability"].get<double>(), 0.5);
    EXPECT_DOUBLE_EQ(r["expectation_entropy"].get<double>(), 0.5);
    const Json &o13 = r["outcomes"][5];
    EXPECT_EQ(o13["i"], 1);
    EXPECT_EQ(o13["j"], 3);
    EXPECT_DOUBLE_EQ(o13["probability"].get<double>(), 0.125);
    EXPECT_DOUBLE_EQ(o13["entanglement"]["det"].get<double>(), 0.25);
    EXPECT_TRUE(o13["entanglement"]["max_entangled"].get<bool>());
    EXPECT_EQ(o13["classification"]["labels"][0], "Stabilizer");
    EXPECT_TRUE(r["outcomes"][4]["zero_probability"].get<bool>());

    Json n = analysis_report(builtin_matrix("pbs2"), NeighborArity::One, EntropyBase::Nats);
    EXPECT_NEAR(n["outcomes"][5]["entanglement"]["entropy"].get<double>(), std::log(2.0), 1e-11);
    EXPECT_EQ(n["unit"], "nats");
}

TEST(io, analysis_report_identity_is_product) {
    Json r = analysis_report(builtin_matrix("identity"), NeighborArity::One);
    for (const auto &o : r["outcomes"]) {
        if (o["relevant"].get<bool>() && !o["zero_probability"].get<bool>()) {
            EXPECT_EQ(o["classification"]["labels"][0], "Product");
        }
    }
}

TEST(io, csv_headers) {
    SweepRow row;
    row.target = 0.5;
    row.hard_value = 0.5;
    row.mean_hard_value = 0.25;
    row.states_used = 6;
    row.seed = 42;
    row.iterations = 1000;
    std::string e = sweep_expectation_csv({row});
    EXPECT_EQ(e.substr(0, e.find('\n')), "p_target,S_exp_max,S_exp_mean,p_total,states_used,seed,iterations,unit");
    EXPECT_NE(e.find("0.5,0.5,0.25,0,6,42,1000,bits"), std::string::npos);
    std::string t = sweep_threshold_csv({row}, EntropyBase::Nats);
    EXPECT_EQ(t.substr(0, t.find('\n')), "s_target_nats,P_max,P_mean,p_total,states_used,seed,iterations,unit");
    EXPECT_NE(t.find("0.34657359028,0.5,0.25"), std::string::npos);
    ScatterResult s = random_scatter(3, 1, ObjectiveKind::Expectation);
    std::string c = scatter_csv(s, ObjectiveKind::Expectation);
    EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 4);
}

TEST(verify, smoke_run_passes) {
    VerifyOptions opts;
    opts.trials = 1;
    auto results = run_verification(opts);
    EXPECT_EQ(results.size(), verify_suite_names().size());
    for (const auto &r : results) {
        EXPECT_TRUE(r.passed()) << r.name << ": " << r.first_failure;
    }
}

TEST(verify, injected_fault_is_caught) {
    VerifyOptions opts;
    opts.trials = 20;
    opts.inject_fault = true;
    SuiteResult r = run_suite("sum_rules", opts);
    EXPECT_FALSE(r.passed());
    EXPECT_GT(r.failures, 0);
    EXPECT_THROW(run_suite("nope", opts), OutOfRange);
    opts.trials = 0;
    EXPECT_THROW(run_verification(opts), OutOfRange);
}
