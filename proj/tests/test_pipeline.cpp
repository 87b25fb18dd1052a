#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"
#include "tvis/checks.hpp"
#include "tvis/manifest.hpp"
#include "tvis/pgm.hpp"

using namespace tvis;
using namespace tvis_test;
namespace fs = std::filesystem;

namespace {

class Workdir {
public:
  Workdir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("tvis_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  std::string operator/(const std::string& name) const { return (dir_ / name).string(); }

private:
  fs::path dir_;
};

int cli(const std::string& args, const std::string& log = "/dev/null") {
  const std::string cmd = std::string(TVIS_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Pgm, BinaryRoundTrip) {
  Image img(3, 4);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = double(i * 20);
  std::stringstream s;
  encode_pgm(s, img, PgmEncoding::binary);
  EXPECT_TRUE(decode_pgm(s) == img);
}

TEST(Pgm, AsciiRoundTripWithComments) {
  std::stringstream s("P2\n# comment\n3 2 # width height\n255\n0 1 2\n253 254 255\n");
  const Image img = decode_pgm(s);
  ASSERT_EQ(img.rows(), 2u);
  ASSERT_EQ(img.cols(), 3u);
  EXPECT_EQ(img(1, 2), 255.0);
  std::stringstream out;
  encode_pgm(out, img, PgmEncoding::ascii);
  EXPECT_TRUE(decode_pgm(out) == img);
}

TEST(Pgm, ClampsAndRounds) {
  Image img(1, 5);
  img[0] = -3.0;
  img[1] = 1.5;
  img[2] = 2.49;
  img[3] = 300.0;
  img[4] = std::nan("");
  const Image q = quantize(img);
  EXPECT_EQ(q[0], 0.0);
  EXPECT_EQ(q[1], 2.0);
  EXPECT_EQ(q[2], 2.0);
  EXPECT_EQ(q[3], 255.0);
  EXPECT_EQ(q[4], 0.0);
}

TEST(Pgm, RejectsMalformedInput) {
  for (const std::string bad : {"P6\n2 2\n255\n", "P5\n2 x\n255\n", "P5\n2 2\n65535\n", "P5\n0 2\n255\n",
                                "P5\n2 2\n255\n\x01\x02", "P2\n2 1\n255\n1\n", "P2\n2 1\n10\n1 11\n"}) {
    std::stringstream s(bad);
    EXPECT_THROW(decode_pgm(s), IoError) << bad;
  }
  EXPECT_THROW(read_image("/nonexistent/file.pgm"), IoError);
}

TEST(Pgm, SmallMaxvalIsKeptAsRead) {
  std::stringstream s("P2\n2 1\n15\n3 15\n");
  const Image img = decode_pgm(s);
  EXPECT_EQ(img[0], 3.0);
  EXPECT_EQ(img[1], 15.0);
}

TEST(Manifest, RoundTrip) {
  Manifest m;
  m.set("command", "restore");
  m.set("lambda", 0.1);
  m.set("iterations", std::size_t{42});
  m.set("backtracking", true);
  m.set("psnr", std::numeric_limits<double>::infinity());
  m.set("lambda", 0.25);
  std::stringstream s;
  m.write(s);
  const Manifest back = Manifest::parse(s);
  EXPECT_EQ(back.entries(), m.entries());
  EXPECT_EQ(back.at("lambda"), "0.25");
  EXPECT_EQ(std::stod(back.at("lambda")), 0.25);
  EXPECT_EQ(back.at("psnr"), "inf");
  EXPECT_FALSE(back.get("missing"));
  EXPECT_THROW(back.at("missing"), std::out_of_range);
}

TEST(Manifest, RejectsBadInput) {
  Manifest m;
  EXPECT_THROW(m.set("a=b", "x"), std::invalid_argument);
  EXPECT_THROW(m.set("k", "two\nlines"), std::invalid_argument);
  std::stringstream s("# note\n\nkey = value\nno separator\n");
  EXPECT_THROW(Manifest::parse(s), IoError);
}

TEST(Manifest, RealsRoundTripExactly) {
  for (const double v : {0.1, 1.0 / 3.0, 553.3765123456789, -2.5e-300}) EXPECT_EQ(std::stod(format_real(v)), v);
}

TEST(OperatorChecks, DefaultSuitePasses) {
  const auto results = run_operator_checks(CheckOptions{});
  EXPECT_FALSE(results.empty());
  for (const CheckResult& r : results) EXPECT_TRUE(r.passed) << r.name << " " << r.detail << " " << r.worst;
}

TEST(OperatorChecks, PassesForAnotherSeed) {
  CheckOptions opt;
  opt.seed = 12345;
  opt.sizes = {{6, 6}, {7, 3}};
  EXPECT_TRUE(all_passed(run_operator_checks(opt)));
}

TEST(OperatorChecks, FlippedSignIsDetected) {
  CheckOptions opt;
  opt.flip_mdd_sign = true;
  opt.sizes = {{5, 7}};
  const auto results = run_operator_checks(opt);
  std::size_t failed = 0;
  for (const CheckResult& r : results)
    if (!r.passed) {
      EXPECT_EQ(r.name, "adjointness");
      ++failed;
    }
  EXPECT_EQ(failed, 2 * opt.directions.size());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("degrade --phantom 64x64"), 1);
  EXPECT_EQ(cli("restore --in a.pgm"), 1);
  EXPECT_EQ(cli("degrade --phantom 64x64 --target-psnr 20 --noise-sigma 2 --out /tmp/x.pgm"), 1);
}

TEST(Cli, IoErrors) {
  Workdir w;
  EXPECT_EQ(cli("degrade --in /nonexistent/in.pgm --out " + (w / "g.pgm")), 3);
  EXPECT_EQ(cli("restore --in /nonexistent/in.pgm --out " + (w / "u.pgm") + " --lambda 1"), 3);
  EXPECT_EQ(cli("replay " + (w / "missing.manifest")), 3);
}

TEST(Cli, CheckOperators) {
  Workdir w;
  EXPECT_EQ(cli("check-operators --sizes 6x5,8x8 --instances 3 --manifest " + (w / "c.manifest")), 0);
  EXPECT_EQ(Manifest::load(w / "c.manifest").at("failed"), "0");
  EXPECT_EQ(cli("check-operators --sizes 6x5 --instances 3 --flip-mdd-sign --manifest " + (w / "f.manifest")), 2);
}

TEST(Cli, DegradeIsReproducibleAndReplayable) {
  Workdir w;
  const std::string args = "degrade --phantom 64x64 --blur gauss:0.8 --target-psnr 21.3 --seed 9 --out ";
  ASSERT_EQ(cli(args + (w / "a.pgm")), 0);
  ASSERT_EQ(cli(args + (w / "b.pgm")), 0);
  EXPECT_EQ(slurp(w / "a.pgm"), slurp(w / "b.pgm"));
  const Manifest m = Manifest::load(w / "a.pgm.manifest");
  EXPECT_NEAR(std::stod(m.at("psnr_noisy_vs_blurred")), 21.3, 0.5);

  const std::string first = slurp(w / "a.pgm");
  fs::remove(w / "a.pgm");
  ASSERT_EQ(cli("replay " + (w / "a.pgm.manifest")), 0);
  EXPECT_EQ(slurp(w / "a.pgm"), first);
}

TEST(Cli, RestoreWritesTraceAndManifest) {
  Workdir w;
  ASSERT_EQ(cli("degrade --phantom 32x32 --blur gauss:0.8 --noise-sigma 5 --seed 1 --out " + (w / "g.pgm") +
                " --reference-out " + (w / "f.pgm")),
            0);
  ASSERT_EQ(cli("restore --in " + (w / "g.pgm") + " --out " + (w / "u.pgm") +
                " --blur gauss:0.8 --lambda 3 --iters 20 --trace " + (w / "t.csv") + " --reference " + (w / "f.pgm")),
            0);
  std::ifstream trace(w / "t.csv");
  std::string header;
  std::getline(trace, header);
  EXPECT_EQ(header, "iter,energy,data_term,tv_term,c,delta_rel");
  std::size_t rows = 0;
  for (std::string line; std::getline(trace, line);) ++rows;
  EXPECT_GE(rows, 2u);
  EXPECT_LE(rows, 21u);
  const Image u = read_image(w / "u.pgm");
  EXPECT_EQ(u.rows(), 32u);
  EXPECT_TRUE(Manifest::load(w / "u.pgm.manifest").get("psnr_restored"));
}

TEST(Cli, TinyStepIsANumericalError) {
  Workdir w;
  ASSERT_EQ(cli("degrade --phantom 32x32 --blur gauss:0.8 --noise-sigma 5 --out " + (w / "g.pgm")), 0);
  EXPECT_EQ(cli("restore --in " + (w / "g.pgm") + " --out " + (w / "u.pgm") +
                " --blur gauss:0.8 --lambda 3 --iters 50 --step 1e-300"),
            2);
}

TEST(Cli, CompareIdenticalImages) {
  Workdir w;
  ASSERT_EQ(cli("degrade --phantom 32x32 --blur gauss:0.8 --out " + (w / "g.pgm")), 0);
  const std::string g = w / "g.pgm";
  ASSERT_EQ(cli("compare " + g + " " + g + " --reference " + g + " --labels a,b --report " + (w / "r.csv")), 0);
  const Manifest m = Manifest::load(w / "r.csv.manifest");
  EXPECT_EQ(m.at("relative_error_percent.a.vs.b"), "0");
  EXPECT_EQ(m.at("psnr.a"), "inf");
  EXPECT_EQ(cli("compare " + g + " --reference " + g), 1);
}
