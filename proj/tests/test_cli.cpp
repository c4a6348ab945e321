#include <doctest.h>

#include <sstream>

#include "pipeline.hpp"
#include "routeplace/cli.hpp"

using namespace routeplace;
namespace fs = std::filesystem;

namespace {

int dispatch_args(const std::vector<std::string> &args, std::string *out_text = nullptr) {
  std::ostringstream out, err;
  int code = dispatch(args, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

}  // namespace

TEST_CASE("help and usage errors") {
  std::string text;
  CHECK(dispatch_args({"--help"}, &text) == 0);
  CHECK(text.find("place") != std::string::npos);
  CHECK(dispatch_args({"place", "--help"}, &text) == 0);
  CHECK(text.find("--netlist") != std::string::npos);
  CHECK(dispatch_args({"place", "--seed", "1", "-o", "x.pl"}, &text) == 1);
  CHECK(text.find("--netlist") != std::string::npos);
  CHECK(dispatch_args({"route", "--bogus"}) == 1);
  CHECK(dispatch_args({"frobnicate"}) == 1);
  CHECK(dispatch_args({"route", "--netlist", "/nonexistent.net", "--placement", "/nonexistent.pl", "-o", "x"}) == 1);
}

TEST_CASE("domain errors exit with code 2") {
  fs::path dir = fs::temp_directory_path() / "routeplace_cli_domain";
  fs::remove_all(dir);
  fs::create_directories(dir);
  rp_test::write_text(dir / "bad.net", "this is not a netlist\n");
  rp_test::write_text(dir / "p.pl", "0 0\n");
  CHECK(rp_test::run_cli(dir, "route --netlist bad.net --placement p.pl -o m.cg") == 2);
  fs::remove_all(dir);
}

TEST_CASE("full pipeline is deterministic and its manifests verify") {
  const fs::path a = fs::temp_directory_path() / "routeplace_pipeline_a";
  const fs::path b = fs::temp_directory_path() / "routeplace_pipeline_b";
  rp_test::PipelineSpec spec;
  REQUIRE(rp_test::run_pipeline(a, spec) == "");
  REQUIRE(rp_test::run_pipeline(b, spec) == "");

  auto ha = rp_test::artifact_hashes(a), hb = rp_test::artifact_hashes(b);
  CHECK(ha.size() > 20);
  CHECK(ha == hb);

  int bad = 0;
  CHECK(rp_test::verify_manifests(a, bad) >= 10);
  CHECK(bad == 0);

  std::string report = read_file(a / "report.txt");
  CHECK(report.find("baseline") != std::string::npos);
  CHECK(report.find("routeplacer") != std::string::npos);
  CHECK(fs::exists(a / "heat" / "baseline.ppm"));
  std::string eval = read_file(a / "eval.txt");
  for (const char *key : {"nrmse", "ssim", "pearson", "spearman", "kendall"}) CHECK(eval.find(key) != std::string::npos);

  // A tampered input no longer matches its manifest.
  rp_test::write_text(a / "n1.net", read_file(a / "n1.net") + "\n");
  CHECK(rp_test::verify_manifests(a, bad) >= 10);
  CHECK(bad > 0);
  fs::remove_all(a);
  fs::remove_all(b);
}
