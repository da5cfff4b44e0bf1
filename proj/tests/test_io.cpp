#include <gtest/gtest.h>

#include <json.hpp>

#include "qpgm/error.hpp"
#include "qpgm/io/csv.hpp"
#include "qpgm/io/dataset.hpp"
#include "qpgm/io/fingerprint.hpp"
#include "qpgm/io/model_file.hpp"
#include "qpgm/io/report.hpp"
#include "qpgm/io/splits_file.hpp"
#include "support.hpp"

using namespace qpgm;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(-1);
}

std::string what_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Csv, QuotingAndLineEnds) {
  const auto rows = io::parse_csv("a,\"b,c\",\"d\"\"e\"\r\n\n1,2,3\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (io::CsvRow{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rows[1], (io::CsvRow{"1", "2", "3"}));
  EXPECT_THROW(io::parse_csv("\"open\n"), Error);
  EXPECT_EQ(io::csv_line({"x", "y,z"}), "x,\"y,z\"\n");
}

TEST(Dataset, ParsesFeaturesAndSortedClasses) {
  const auto d = io::parse_dataset("f1,label,f2\n1.5,b,2\n-3,a,4e-1\n0,b,+1\n");
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"f1", "f2"}));
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.labels, (std::vector<ClassId>{1, 0, 1}));
  EXPECT_DOUBLE_EQ(d.rows[1][1], 0.4);
  EXPECT_EQ(d.fingerprint.size(), 64u);
}

TEST(Dataset, RejectsMissingAndBadCellsWithPosition) {
  const auto msg = what_of([] { io::parse_dataset("x,y,label\n1,2,a\n3,,b\n"); });
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'y'"), std::string::npos) << msg;
  EXPECT_EQ(kind_of([] { io::parse_dataset("x,label\n1,a\n2\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { io::parse_dataset("x,label\nabc,a\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { io::parse_dataset("x,y\n1,2\n"); }), ErrorKind::SchemaMismatch);
  EXPECT_EQ(kind_of([] { io::parse_dataset(""); }), ErrorKind::ParseError);
}

TEST(Dataset, UnlabelledAndEmpty) {
  const auto d = io::parse_dataset("x,y\n1,2\n", "label", false);
  EXPECT_FALSE(d.has_labels);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(io::parse_dataset("x,y,label\n", "label", false).size(), 0u);
}

TEST(Dataset, SchemaChecks) {
  const auto d = io::parse_dataset("x,z,label\n1,2,a\n");
  const std::vector<std::string> expected{"x", "y"};
  const auto msg = what_of([&] { io::require_feature_schema(d, expected); });
  EXPECT_NE(msg.find("'z'"), std::string::npos) << msg;
  const std::vector<std::string> classes{"b"};
  EXPECT_EQ(kind_of([&] { io::labels_against(d, classes); }), ErrorKind::SchemaMismatch);
}

TEST(Fingerprint, LineEndingsCanonicalisedMutationsDetected) {
  const std::string a = "x,label\n1,a\n2,b\n";
  EXPECT_EQ(io::fingerprint(a), io::fingerprint("x,label\r\n1,a\r\n2,b\r\n"));
  EXPECT_EQ(io::fingerprint(a), io::fingerprint(a + "\n\n"));
  std::string b = a;
  b[9] = '3';
  EXPECT_NE(io::fingerprint(a), io::fingerprint(b));
  // SHA-256 of "abc\n".
  EXPECT_EQ(io::fingerprint("abc"), "edeaaff3f1774ad2888673770c6d64097e391bc362d7d6fb34982ddf0efd18cb");
}

TEST(SplitFile, RoundTripAndValidation) {
  const std::vector<ClassId> labels{0, 0, 0, 1, 1, 1, 0, 1};
  io::SplitFile f;
  f.fingerprint_algorithm = std::string(io::kFingerprintAlgorithm);
  f.fingerprint = "abc";
  f.num_rows = labels.size();
  f.master_seed = 18446744073709551615ull;
  f.test_fraction = 0.25;
  f.generator = "test";
  f.splits = stratified_holdout(labels, 0.25, 3, 1);
  const auto text = io::to_json(f);
  const auto back = io::split_file_from_json(text);
  EXPECT_EQ(io::to_json(back), text);
  EXPECT_EQ(*back.master_seed, *f.master_seed);
  EXPECT_EQ(back.splits[2].test, f.splits[2].test);
  EXPECT_NO_THROW(io::require_fingerprint(back, "abc", 8));
  EXPECT_EQ(kind_of([&] { io::require_fingerprint(back, "abd", 8); }), ErrorKind::FingerprintMismatch);
  EXPECT_EQ(kind_of([&] { io::require_fingerprint(back, "abc", 9); }), ErrorKind::FingerprintMismatch);

  auto j = nlohmann::json::parse(text);
  j["repetitions"][0]["test"].push_back(j["repetitions"][0]["train"][0]);
  EXPECT_EQ(kind_of([&] { io::split_file_from_json(j.dump()); }), ErrorKind::SchemaMismatch);
}

TEST(ModelFile, RoundTripReproducesScores) {
  const auto blobs = test::gaussian_blobs(3, 15, 3, 3.0, 3);
  for (auto engine : {EngineKind::Dense, EngineKind::Gram}) {
    FitOptions opts;
    opts.engine = engine;
    opts.copies = 3;
    opts.priors = PriorMode::Empirical;
    opts.encoding.kind = EncodingKind::Stereographic;
    opts.encoding.rescale_alpha = 0.5;
    io::ModelBundle bundle{fit_classifier(blobs.rows, blobs.labels, 3, opts), {"a", "b", "c"}, {"x", "y", "z"}};
    const auto text = io::to_json(bundle);
    const auto back = io::model_from_json(text);
    EXPECT_EQ(back.model.engine_kind(), engine);
    EXPECT_EQ(back.class_names, bundle.class_names);
    EXPECT_EQ(io::to_json(back), text);
    for (const auto& x : blobs.rows) {
      EXPECT_LE((back.model.score(x) - bundle.model.score(x)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ModelFile, RejectsForeignDocuments) {
  EXPECT_NE(kind_of([] { io::model_from_json("{\"format\":\"other\"}"); }), static_cast<ErrorKind>(-1));
  EXPECT_NE(kind_of([] { io::model_from_json("not json"); }), static_cast<ErrorKind>(-1));
}

TEST(Report, EvaluationJsonCarriesLongFormatMetrics) {
  const std::vector<ClassId> t{0, 0, 1, 1}, p{0, 1, 1, 1};
  std::vector<ScoreVector> s;
  for (double x : {0.9, 0.4, 0.2, 0.1}) {
    ScoreVector v(2);
    v << x, 1 - x;
    s.push_back(v);
  }
  const std::vector<std::string> names{"neg", "pos"};
  const auto r = evaluate(t, p, s, 2, ClassId{1});
  const auto json = io::evaluation_json(r, names, {{"seed", "1"}});
  EXPECT_EQ(json, io::evaluation_json(r, names, {{"seed", "1"}}));
  const auto back = io::read_report_metrics(json);
  const auto flat = flatten(r, names);
  ASSERT_EQ(back.entries.size(), flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    EXPECT_EQ(back.entries[i].metric, flat[i].metric);
    EXPECT_EQ(back.entries[i].value, flat[i].value);
  }
  const auto csv = io::evaluation_csv(r, names);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "split,metric,class,value");
  EXPECT_NE(csv.find("test,accuracy,,0.75\n"), std::string::npos) << csv;
  const auto auc = io::class_auc_of(back, "m");
  EXPECT_EQ(auc.auc, (std::vector<double>{1.0, 1.0}));
}

TEST(Report, DifferenceAndWinLossCsv) {
  const std::vector<MetricDifference> d{{"accuracy", "", 0.8, 0.7952, 0.8 - 0.7952}};
  EXPECT_EQ(io::difference_csv(d), "metric,class,a,b,difference\naccuracy,,0.8,0.7952,0.0048000000000000265\n");
  const std::vector<std::string> cls{"a", "b", "c"};
  const auto wl = win_loss(std::vector<ModelClassAuc>{{"A", cls, {0.9, 0.8, 0.5}}, {"B", cls, {0.7, 0.6, 0.6}}});
  EXPECT_EQ(io::win_loss_csv(wl), "row,A,B\nA,0,0.6666666666666666\nB,0.3333333333333333,0\n");
}
