#include <doctest.h>

#include <string>

#include "remat/manifest.hpp"

using namespace remat;

TEST_CASE("fnv1a64 matches the reference constants") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("hello") == 0xa430d84680aabd0bULL);
  CHECK(fnv1a64("hello") != fnv1a64("hellp"));
}

TEST_CASE("digests render as fixed-width lowercase hex") {
  CHECK(digest_hex(0) == "0000000000000000");
  CHECK(digest_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(digest_hex(0xfULL) == "000000000000000f");
}

TEST_CASE("manifest comments are stable and carry no timing") {
  RunManifest m;
  m.command_line = "remat simulate rank --n 4";
  m.seed = 17;
  m.input_digests.push_back({"config", fnv1a64("hello")});
  const std::string text = manifest_comment(m);
  CHECK(text ==
        "# remat 0.1.0\n"
        "# command: remat simulate rank --n 4\n"
        "# seed: 17\n"
        "# input config: a430d84680aabd0b\n");
  CHECK(text.find("time") == std::string::npos);
  CHECK(manifest_comment(m) == text);
}
