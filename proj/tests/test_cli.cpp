#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("sbm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  Result run(const std::string& args) {
    const fs::path log = root_ / "log.txt";
    const std::string cmd = std::string(SBM_SPECTRAL_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(log);
    return r;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  fs::path write(const std::string& name, const std::string& contents) {
    const fs::path p = root_ / name;
    std::ofstream(p, std::ios::binary) << contents;
    return p;
  }

  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  fs::path root_;
};

TEST_F(CliTest, GenerateFourParameter) {
  ASSERT_EQ(run("generate --four-param 5 8 0.2 0.1 --seed 1 --out " + dir("a")).code, 0);
  const std::string edges = slurp(root_ / "a" / "edges.txt");
  EXPECT_EQ(edges.rfind("# nodes=40\n", 0), 0u);
  EXPECT_EQ(slurp(root_ / "a" / "model.txt"), "5 8 0.2 0.1\n");
  EXPECT_NE(slurp(root_ / "a" / "manifest.txt").find("seed=1\n"), std::string::npos);
}

TEST_F(CliTest, GenerateRejectsInvalidModel) {
  const Result r = run("generate --four-param 2 5 0.8 0.4 --out " + dir("a"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("p + r"), std::string::npos);
  EXPECT_EQ(run("generate --out " + dir("a")).code, 1);
}

TEST_F(CliTest, GenerateFromModelFile) {
  const fs::path m = write("m.json",
                           "{\"format\": \"sbm-v1\", \"membership\": [0, 0, 1, 1], "
                           "\"B\": [[0, 1], [1, 0]]}");
  ASSERT_EQ(run("generate --model " + m.string() + " --out " + dir("a")).code, 0);
  EXPECT_EQ(slurp(root_ / "a" / "edges.txt"), "# nodes=4\n0 2\n0 3\n1 2\n1 3\n");
}

TEST_F(CliTest, ClusterHeterophilic) {
  const fs::path e = write("e.txt", "# nodes=4\n0 2\n0 3\n1 2\n1 3\n");
  ASSERT_EQ(run("cluster --edges " + e.string() + " --k 2 --out " + dir("c")).code, 0);
  const std::string a = slurp(root_ / "c" / "assignments.txt");
  std::istringstream in(a);
  int id[4];
  int cl[4];
  for (int i = 0; i < 4; ++i) in >> id[i] >> cl[i];
  EXPECT_EQ(cl[0], cl[1]);
  EXPECT_EQ(cl[2], cl[3]);
  EXPECT_NE(cl[0], cl[2]);
}

TEST_F(CliTest, ClusterKEqualsN) {
  const fs::path e = write("e.txt", "# nodes=4\n0 1\n1 2\n2 3\n0 3\n0 2\n");
  ASSERT_EQ(run("cluster --edges " + e.string() + " --k 4 --out " + dir("c")).code, 0);
  EXPECT_NE(slurp(root_ / "c" / "manifest.txt").find("objective=0\n"), std::string::npos);
}

TEST_F(CliTest, ClusterIsolatedNodes) {
  const fs::path e = write("e.txt", "# nodes=5\n0 1\n1 2\n0 2\n3 0\n");
  const Result r = run("cluster --edges " + e.string() + " --k 2 --out " + dir("c"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("--drop-isolated"), std::string::npos);
  ASSERT_EQ(run("cluster --edges " + e.string() + " --k 2 --drop-isolated --out " + dir("c")).code,
            0);
  EXPECT_NE(slurp(root_ / "c" / "assignments.txt").find("4 0\n"), std::string::npos);
}

TEST_F(CliTest, ClusterWithModelWritesDiagnostics) {
  ASSERT_EQ(run("generate --four-param 3 40 0.3 0.1 --seed 3 --out " + dir("g")).code, 0);
  const std::string g = dir("g");
  ASSERT_EQ(run("cluster --edges " + g + "/edges.txt --model " + g + "/model.txt --k 3 --out " +
                dir("c"))
                .code,
            0);
  const std::string csv = slurp(root_ / "c" / "diagnostics.csv");
  EXPECT_EQ(csv.rfind("n,k,tau,", 0), 0u);
  EXPECT_TRUE(fs::exists(root_ / "c" / "diagnostics.txt"));
  EXPECT_EQ(run("cluster --edges " + g + "/edges.txt --model " + g + "/model.txt --k 2 --out " +
                dir("c"))
                .code,
            1);
}

TEST_F(CliTest, ClusterMalformedEdgeList) {
  const fs::path e = write("e.txt", "0 1\n1 2 extra\n");
  const Result r = run("cluster --edges " + e.string() + " --k 2 --out " + dir("c"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 2"), std::string::npos);
}

TEST_F(CliTest, SimQuick) {
  ASSERT_EQ(run("sim 1 --quick --out " + dir("s")).code, 0);
  const std::string svg = slurp(root_ / "s" / "sim1.svg");
  std::size_t panels = 0;
  for (auto pos = svg.find("<g>"); pos != std::string::npos; pos = svg.find("<g>", pos + 1)) ++panels;
  EXPECT_EQ(panels, 2u);
  EXPECT_TRUE(fs::exists(root_ / "s" / "sim1.csv"));
  EXPECT_TRUE(fs::exists(root_ / "s" / "sim1_summary.csv"));
  EXPECT_NE(slurp(root_ / "s" / "manifest.txt").find("base_seed="), std::string::npos);
}

TEST_F(CliTest, SimUnknownIndex) {
  EXPECT_EQ(run("sim 4 --out " + dir("s")).code, 1);
  EXPECT_EQ(run("sim --out " + dir("s")).code, 1);
}

TEST_F(CliTest, AuditTriangleAndDuplicates) {
  const fs::path t = write("t.txt", "a b\nb c\nc a\n");
  ASSERT_EQ(run("audit " + t.string() + " --out " + dir("a")).code, 0);
  const std::string audit = slurp(root_ / "a" / "audit.csv");
  EXPECT_NE(audit.find("\n3,2,2,100,100,"), std::string::npos);
  EXPECT_EQ(slurp(root_ / "a" / "id_map.txt"), "0 a\n1 b\n2 c\n");
  const fs::path d = write("d.txt", "a b\nb c\nc a\nb a\na b\n");
  ASSERT_EQ(run("audit " + d.string() + " --out " + dir("b")).code, 0);
  EXPECT_EQ(slurp(root_ / "b" / "audit.csv"), audit);
}

TEST_F(CliTest, AuditEmptyFile) {
  const fs::path e = write("e.txt", "");
  const Result r = run("audit " + e.string() + " --out " + dir("a"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("no edges"), std::string::npos);
  EXPECT_FALSE(fs::exists(root_ / "a" / "audit.csv"));
}

TEST_F(CliTest, OutputDirFromEnvironment) {
  const std::string cmd = "SBM_SPECTRAL_OUT=" + dir("env") + " " + SBM_SPECTRAL_BIN +
                          " generate --four-param 2 3 0.5 0.1 > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(root_ / "env" / "edges.txt"));
}

}  // namespace
