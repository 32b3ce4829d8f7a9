#!/usr/bin/env python3
"""Regenerate the committed golden ELF fixtures under tests/data/."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import elfbuild

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "golden.so").write_bytes(elfbuild.golden_bytes())
    (DATA / "globdat.so").write_bytes(elfbuild.glob_dat_bytes())
    print(f"wrote fixtures under {DATA}")


if __name__ == "__main__":
    main()
