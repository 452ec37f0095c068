#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "sftorient/dataset.hpp"
#include "sftorient/loop_io.hpp"
#include "sftorient/weyl.hpp"

using namespace sftorient;
using nlohmann::json;

namespace {

const std::string data_dir = SFTORIENT_DATA;

json base() {
    return json::parse(R"({
      "n": 3, "h2_rank": 1,
      "orbits": [{"id": "x", "grading": 1}, {"id": "y", "grading": 0}],
      "curves": [{"genus": 0, "pos": ["x"], "neg": ["y"], "homology": [0], "count": 2}]
    })");
}

std::string load_error(const json& j) {
    try {
        validate_dataset(dataset_from_json(j, "test.json"));
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(LoadDataset, FourOrbitExample) {
    const auto ds = load_dataset(data_dir + "/four-orbit-example.json");
    EXPECT_EQ(ds.orbits.size(), 4u);
    EXPECT_EQ(ds.curves.size(), 2u);
    EXPECT_EQ(ds.curves[0].count, 2);
    EXPECT_EQ(ds.curves[1].count, 3);
}

TEST(LoadDataset, GradingOverride) {
    const auto ds = load_dataset(data_dir + "/four-orbit-example.json", std::vector<int>{1, 0, 0, 0});
    EXPECT_EQ(ds.orbits[0].grading, 1);
    EXPECT_EQ(ds.orbits[3].grading, 0);
    EXPECT_THROW(load_dataset(data_dir + "/four-orbit-example.json", std::vector<int>{0, 0, 0, 0}), InputError);
    EXPECT_THROW(load_dataset(data_dir + "/four-orbit-example.json", std::vector<int>{1, 1}), InputError);
}

TEST(LoadDataset, MissingAndMalformedFiles) {
    EXPECT_THROW(load_dataset(data_dir + "/no-such-file.json"), InputError);
    const auto path = std::filesystem::temp_directory_path() / "sftorient-malformed.json";
    std::ofstream(path) << "{ not json";
    try {
        load_dataset(path.string());
        FAIL() << "expected an InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST(DatasetFromJson, Defaults) {
    auto j = base();
    j["orbits"][0].erase("grading");
    j["orbits"][0]["mu_cz"] = 3;
    const auto ds = dataset_from_json(j, "test.json");
    EXPECT_EQ(ds.orbits[0].grading, grading_from_mu(3, 3));
    EXPECT_EQ(ds.orbits[0].sort_key, 0);
    EXPECT_EQ(ds.orbits[1].sort_key, 1);
    EXPECT_EQ(ds.orbits[1].multiplicity, 1);
    EXPECT_FALSE(ds.geometry_consistent);
}

TEST(DatasetFromJson, CountForms) {
    auto j = base();
    j["curves"][0]["count"] = "-3/4";
    EXPECT_EQ(dataset_from_json(j, "t").curves[0].count, Rational(-3, 4));
    j["curves"][0]["count"] = json::array({1, 1, -1, 1});
    EXPECT_EQ(dataset_from_json(j, "t").curves[0].count, 2);
    j["curves"][0]["count"] = json::array({2});
    EXPECT_THROW(dataset_from_json(j, "t"), InputError);
    j["curves"][0]["count"] = 1.5;
    EXPECT_THROW(dataset_from_json(j, "t"), InputError);
}

TEST(DatasetFromJson, EmptyCurvesGiveZeroHamiltonian) {
    auto j = base();
    j["curves"] = json::array();
    const auto ds = dataset_from_json(j, "t");
    validate_dataset(ds);
    const auto alg = weyl::WeylAlgebra::from_dataset(ds);
    EXPECT_TRUE(weyl::build_hamiltonian(alg, ds).is_zero());
}

TEST(ValidateDataset, ErrorsNameFileAndRecord) {
    EXPECT_EQ(load_error(base()), "");

    auto j = base();
    j["curves"][0]["neg"] = json::array({"zz"});
    EXPECT_NE(load_error(j).find("test.json: curve 0: unknown orbit id 'zz'"), std::string::npos);

    j = base();
    j["curves"][0]["homology"] = json::array({0, 1});
    EXPECT_NE(load_error(j).find("curve 0: homology vector"), std::string::npos);

    j = base();
    j["curves"][0]["neg"] = json::array();
    j["curves"][0]["pos"] = json::array({"y"});
    EXPECT_NE(load_error(j).find("curve 0: total grading is even"), std::string::npos);

    j = base();
    j["curves"][0]["rigid"] = false;
    j["curves"][0]["pos"] = json::array({"y"});
    j["curves"][0]["neg"] = json::array();
    EXPECT_EQ(load_error(j), "");

    j = base();
    j["orbits"][0]["mu_cz"] = 1;  // grading would be 1 + 3 - 1 = 1 mod 2, consistent
    EXPECT_EQ(load_error(j), "");
    j["orbits"][0]["mu_cz"] = 2;
    EXPECT_NE(load_error(j).find("orbit 0 ('x'): grading disagrees"), std::string::npos);

    j = base();
    j["orbits"][1]["id"] = "x";
    EXPECT_NE(load_error(j).find("duplicate orbit id"), std::string::npos);

    j = base();
    j["orbits"][1]["sort_key"] = 0;
    EXPECT_NE(load_error(j).find("duplicate sort_key"), std::string::npos);

    j = base();
    j["orbits"][0]["multiplicity"] = 0;
    EXPECT_NE(load_error(j).find("multiplicity"), std::string::npos);

    j = base();
    j["curves"][0]["pos"] = json::array({"x", "x", "x"});
    EXPECT_NE(load_error(j).find("repeated on one side"), std::string::npos);

    j = base();
    j["curves"][0].erase("pos");
    EXPECT_NE(load_error(j).find("curve 0: missing field 'pos'"), std::string::npos);

    j = base();
    j["n"] = "three";
    EXPECT_NE(load_error(j).find("field 'n' has the wrong type"), std::string::npos);
}

TEST(DatasetToJson, RoundTrip) {
    const auto ds = load_dataset(data_dir + "/chom-cancel.json");
    const auto again = dataset_from_json(dataset_to_json(ds), ds.source);
    EXPECT_EQ(dataset_to_json(again), dataset_to_json(ds));
    EXPECT_TRUE(again.geometry_consistent);
}

TEST(LoopIo, FourierAndSamples) {
    const auto loop = cz::load_loop(data_dir + "/rotation-pi.json");
    EXPECT_EQ(loop.dim(), 2);
    EXPECT_NEAR(loop(0.4)(0, 0), std::numbers::pi, 1e-15);

    const auto sampled = cz::loop_from_json(json::parse(R"({"samples": [[[1, 0], [0, 1]], [[3, 0], [0, 3]]]})"));
    EXPECT_NEAR(sampled(0.0)(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(sampled(0.5)(1, 1), 3.0, 1e-12);
    EXPECT_THROW(cz::loop_from_json(json::parse(R"({"dim": 3, "fourier": []})")), std::exception);
}
