// Copyright 2026 The panolayers Authors
// SPDX-License-Identifier: Apache-2.0

#include "synthetic_scene.hpp"

#include <cstdlib>
#include <iostream>

int
main(int argc, char **argv) {
    if (argc < 2) {
        std::cerr << "usage: make_fixture <out_dir> [width]\n";
        return 2;
    }
    const int width = argc > 2 ? std::atoi(argv[2]) : 512;
    panolayers::testsupport::write_fixture(panolayers::testsupport::render_fixture(width, width / 2), argv[1]);
    return 0;
}
