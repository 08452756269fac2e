#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "../oracles.hpp"
#include "dscv/error.hpp"
#include "dscv/io.hpp"

using namespace dscv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("dscv_io_" + std::to_string(getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void dump(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

template <class T>
void put(std::string& s, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  s.append(b, sizeof(T));
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("flo round trip with invalid pixels") {
    TempDir dir;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> u(-20, 20);
    FlowField f(5, 7);
    for (float& x : f.u_data()) x = u(rng);
    for (float& x : f.v_data()) x = u(rng);
    f.set_valid(2, 3, false);
    f.u(2, 3) = 0.0f;
    f.v(2, 3) = 0.0f;
    io::write_flo(dir / "a.flo", f);
    CHECK(io::read_flo(dir / "a.flo") == f);
    const std::string bytes = slurp(dir / "a.flo");
    CHECK(bytes.size() == 12 + 5 * 7 * 8);
    float sentinel;
    std::int32_t w, h;
    std::memcpy(&sentinel, bytes.data(), 4);
    std::memcpy(&w, bytes.data() + 4, 4);
    std::memcpy(&h, bytes.data() + 8, 4);
    CHECK(sentinel == 202021.25f);
    CHECK(w == 7);
    CHECK(h == 5);
  }

  TEST_CASE("flo failures") {
    TempDir dir;
    std::string s;
    put(s, 1.0f);
    put(s, std::int32_t{1});
    put(s, std::int32_t{1});
    put(s, 0.0f);
    put(s, 0.0f);
    dump(dir / "m.flo", s);
    CHECK(code_of([&] { io::read_flo(dir / "m.flo"); }) == ErrorCode::BadMagic);
    s.clear();
    put(s, 202021.25f);
    put(s, std::int32_t{4});
    put(s, std::int32_t{4});
    put(s, 0.0f);
    dump(dir / "t.flo", s);
    CHECK(code_of([&] { io::read_flo(dir / "t.flo"); }) == ErrorCode::TruncatedFile);
    s.clear();
    put(s, 202021.25f);
    put(s, std::int32_t{100000});
    put(s, std::int32_t{4});
    dump(dir / "o.flo", s);
    CHECK(code_of([&] { io::read_flo(dir / "o.flo"); }) == ErrorCode::DimensionOverflow);
    CHECK(code_of([&] { io::read_flo(dir / "missing.flo"); }) == ErrorCode::IoError);
  }

  TEST_CASE("pfm round trip and layout") {
    TempDir dir;
    std::mt19937_64 rng(2);
    auto g = oracle::random_grid(rng, 4, 6, 1, 0.0, 10.0);
    g.set_valid(1, 1, false);
    g(1, 1) = 0.0f;
    io::write_pfm(dir / "a.pfm", g);
    CHECK(io::read_pfm(dir / "a.pfm") == g);
    const std::string bytes = slurp(dir / "a.pfm");
    REQUIRE(bytes.rfind("Pf\n6 4\n-1", 0) == 0);
    // Rows are stored bottom-up: the first sample is the bottom-left pixel.
    float first;
    std::memcpy(&first, bytes.data() + (bytes.size() - 4 * 24), 4);
    CHECK(first == g(3, 0));
  }

  TEST_CASE("pfm reads big-endian data") {
    TempDir dir;
    std::string s = "Pf\n2 1\n1.0\n";
    for (float v : {1.5f, -2.0f}) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      for (int shift = 24; shift >= 0; shift -= 8) s.push_back(static_cast<char>((bits >> shift) & 0xff));
    }
    dump(dir / "be.pfm", s);
    const auto g = io::read_pfm(dir / "be.pfm");
    CHECK(g(0, 0) == 1.5f);
    CHECK(g(0, 1) == -2.0f);
  }

  TEST_CASE("pfm failures") {
    TempDir dir;
    dump(dir / "pf.pfm", "PF\n1 1\n-1\n" + std::string(12, '\0'));
    CHECK(code_of([&] { io::read_pfm(dir / "pf.pfm"); }) == ErrorCode::BadHeader);
    dump(dir / "x.pfm", "P6\n1 1\n255\n");
    CHECK(code_of([&] { io::read_pfm(dir / "x.pfm"); }) == ErrorCode::BadHeader);
    dump(dir / "t.pfm", "Pf\n2 2\n-1\n" + std::string(8, '\0'));
    CHECK(code_of([&] { io::read_pfm(dir / "t.pfm"); }) == ErrorCode::TruncatedFile);
    dump(dir / "z.pfm", "Pf\n0 2\n-1\n");
    CHECK(code_of([&] { io::read_pfm(dir / "z.pfm"); }) == ErrorCode::BadHeader);
  }

  TEST_CASE("dscv round trip keeps depths, costs and validity") {
    TempDir dir;
    std::mt19937_64 rng(3);
    costvolume::CostVolume cv(costvolume::make_hypotheses(1.0, 8.0, 5, costvolume::Spacing::InverseLinear), 3, 4);
    std::uniform_real_distribution<float> u(0, 2);
    for (float& c : cv.costs()) c = u(rng);
    for (auto& v : cv.validity()) v = rng() % 4 != 0;
    io::write_dscv(dir / "a.dscv", cv);
    const auto back = io::read_dscv(dir / "a.dscv");
    CHECK(back.costs().size() == cv.costs().size());
    CHECK(std::equal(back.costs().begin(), back.costs().end(), cv.costs().begin()));
    CHECK(std::equal(back.validity().begin(), back.validity().end(), cv.validity().begin()));
    for (std::size_t k = 0; k < 5; ++k) CHECK(back.hypotheses()[k] == cv.hypotheses()[k]);
    CHECK(slurp(dir / "a.dscv").size() == 20 + 5 * 4 + 60 * 4 + (60 + 7) / 8);

    std::string bytes = slurp(dir / "a.dscv");
    bytes[0] = 'X';
    dump(dir / "m.dscv", bytes);
    CHECK(code_of([&] { io::read_dscv(dir / "m.dscv"); }) == ErrorCode::BadMagic);
    bytes = slurp(dir / "a.dscv");
    bytes[4] = 2;
    dump(dir / "v.dscv", bytes);
    CHECK(code_of([&] { io::read_dscv(dir / "v.dscv"); }) == ErrorCode::VersionMismatch);
    bytes = slurp(dir / "a.dscv");
    dump(dir / "t.dscv", bytes.substr(0, bytes.size() - 1));
    CHECK(code_of([&] { io::read_dscv(dir / "t.dscv"); }) == ErrorCode::TruncatedFile);
  }

  TEST_CASE("dsfw round trip") {
    TempDir dir;
    std::vector<float> w(18), b(3);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.25f * static_cast<float>(i) - 1.0f;
    b = {0.5f, -0.5f, 3.0f};
    const fusion::FusionWeights fw(3, w, b);
    io::write_dsfw(dir / "w.dsfw", fw);
    const auto back = io::read_dsfw(dir / "w.dsfw");
    CHECK(back.bins() == 3);
    for (int k = 0; k < 3; ++k) {
      CHECK(back.bias(k) == fw.bias(k));
      for (int j = 0; j < 6; ++j) CHECK(back.weight(k, j) == fw.weight(k, j));
    }
    std::string bytes = slurp(dir / "w.dsfw");
    dump(dir / "m.dsfw", "DSCV" + bytes.substr(4));
    CHECK(code_of([&] { io::read_dsfw(dir / "m.dsfw"); }) == ErrorCode::BadMagic);
  }

  TEST_CASE("png masks and images") {
    TempDir dir;
    Mask m(5, 9);
    m.set(0, 0, true);
    m.set(4, 8, true);
    m.set(2, 3, true);
    io::write_mask_png(dir / "m.png", m);
    CHECK(io::read_mask_png(dir / "m.png") == m);

    ImageGrid img(3, 4, 1);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) img(y, x) = 0.1f * static_cast<float>(y * 4 + x) - 0.05f;
    io::write_image_png(dir / "i.png", img);
    const auto back = io::read_image(dir / "i.png");
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 4; ++x) {
        const float expect = std::clamp(img(y, x), 0.0f, 1.0f);
        CHECK(std::abs(back(y, x) - expect) <= 0.5f / 255.0f + 1e-6f);
      }
    }
    dump(dir / "bad.png", "not a png");
    CHECK(is_io_error(code_of([&] { io::read_mask_png(dir / "bad.png"); })));
    CHECK(code_of([&] { io::read_image(dir / "i.bmp"); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("flow colouring") {
    FlowField f(1, 3);
    f.u(0, 0) = 1.0f;
    f.u(0, 1) = -1.0f;
    f.set_valid(0, 2, false);
    const auto c = io::flow_to_color(f);
    REQUIRE(c.channels() == 3);
    // Rightward flow is red, leftward flow is cyan on the Middlebury wheel.
    CHECK(c(0, 0, 0) > 0.9f);
    CHECK(c(0, 0, 2) < 0.1f);
    CHECK(c(0, 1, 0) < 0.1f);
    CHECK(c(0, 1, 2) > 0.5f);
    for (int ch = 0; ch < 3; ++ch) CHECK(c(0, 2, ch) == 0.0f);
  }
}
