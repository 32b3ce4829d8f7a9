"""Build reference-count corpora from ELF shared objects and text dumps.

A "reference" is a dynamic relocation entry (JUMP_SLOT or GLOB_DAT) grouped
by the dynamic-symbol name it targets; this yields true per-object counts
rather than mere symbol presence.  Only ELF64 little-endian files are parsed
natively; anything else can be ingested through the tab-separated text
format (``object<TAB>symbol[<TAB>count]``).

Corpus files are JSON lines, one object per line:

    {"object": str, "size_bits": int, "refs": {symbol: count, ...}}

Unknown extra fields are ignored on load.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import ElfParseError, InputParseError, ValidationError

log = logging.getLogger(__name__)

ELF_MAGIC = b"\x7fELF"
ELFCLASS64 = 2
ELFDATA2LSB = 1

SHT_STRTAB = 3
SHT_RELA = 4
SHT_DYNSYM = 11

EM_X86_64 = 62
EM_AARCH64 = 183

# Relocation types counted as component references, per machine:
# (GLOB_DAT, JUMP_SLOT).  Unlisted machines fall back to the x86-64 numbering.
_REFERENCE_RELOC_TYPES = {
    EM_X86_64: frozenset({6, 7}),
    EM_AARCH64: frozenset({1025, 1026}),
}
_DEFAULT_RELOC_TYPES = _REFERENCE_RELOC_TYPES[EM_X86_64]

_EHDR_TAIL = struct.Struct("<HHIQQQIHHHHHH")   # after the 16-byte e_ident
_SHDR = struct.Struct("<IIQQQQIIQQ")
_SYM = struct.Struct("<IBBHQQ")
_RELA = struct.Struct("<QQq")


@dataclass(frozen=True)
class ObjectRecord:
    """Per-component reference counts for one scanned object."""

    name: str
    size_bits: int
    refs: dict[str, int]

    def __post_init__(self):
        if self.size_bits <= 0:
            raise ValidationError(f"object {self.name!r}: size_bits must be > 0")
        for sym, count in self.refs.items():
            if not sym:
                raise ValidationError(f"object {self.name!r}: empty symbol name")
            if count < 1:
                raise ValidationError(f"object {self.name!r}: count for {sym!r} is {count}")


@dataclass(frozen=True)
class Corpus:
    """A set of scanned objects plus the rank assignment over all symbols.

    Ranks run 1..K by descending total count, ties broken by symbol name
    ascending.
    """

    objects: tuple[ObjectRecord, ...]
    component_index: dict[str, int]

    def total_counts(self) -> dict[str, int]:
        totals: dict[str, int] = {}
        for obj in self.objects:
            for sym, count in obj.refs.items():
                totals[sym] = totals.get(sym, 0) + count
        return totals

    def total_bits(self) -> int:
        return sum(obj.size_bits for obj in self.objects)


def _cstring(data: bytes, offset: int) -> str:
    if offset < 0 or offset >= len(data):
        return ""
    end = data.find(b"\x00", offset)
    if end == -1:
        end = len(data)
    return data[offset:end].decode("utf-8", errors="replace")


class _ElfFile:
    """Minimal ELF64 little-endian reader for the sections we need."""

    def __init__(self, data: bytes, name: str):
        self.data = data
        self.name = name
        if len(data) < 64:
            raise ElfParseError(f"{name}: truncated ELF header", offset=len(data))
        if data[:4] != ELF_MAGIC:
            raise ElfParseError(f"{name}: not an ELF file", offset=0)
        if data[4] != ELFCLASS64:
            raise ElfParseError(f"{name}: not ELF64 (class {data[4]})", offset=4)
        if data[5] != ELFDATA2LSB:
            raise ElfParseError(f"{name}: not little-endian (data {data[5]})", offset=5)
        (self.e_type, self.e_machine, _ver, _entry, _phoff, self.e_shoff,
         _flags, _ehsize, _phentsize, _phnum, self.e_shentsize, self.e_shnum,
         _shstrndx) = _EHDR_TAIL.unpack_from(data, 16)
        self.sections = self._read_section_headers()
        self._symbols: dict[int, list[str]] = {}

    def _read_section_headers(self):
        sections = []
        if self.e_shoff == 0 or self.e_shnum == 0:
            return sections
        if self.e_shentsize < _SHDR.size:
            raise ElfParseError(
                f"{self.name}: section header entry size {self.e_shentsize} too small",
                offset=58)
        for i in range(self.e_shnum):
            off = self.e_shoff + i * self.e_shentsize
            if off + _SHDR.size > len(self.data):
                raise ElfParseError(f"{self.name}: truncated section header table",
                                    offset=off)
            sections.append(_SHDR.unpack_from(self.data, off))
        return sections

    def section_bytes(self, index: int) -> bytes:
        (_name, _type, _flags, _addr, offset, size, _link, _info,
         _align, _entsize) = self.sections[index]
        if offset + size > len(self.data):
            raise ElfParseError(f"{self.name}: section {index} extends past end of file",
                                offset=offset)
        return self.data[offset : offset + size]

    def symbol_names(self, symtab_index: int) -> list[str]:
        """Names of all entries of the symbol table at ``symtab_index``."""
        if symtab_index in self._symbols:
            return self._symbols[symtab_index]
        if not 0 <= symtab_index < len(self.sections):
            raise ElfParseError(f"{self.name}: symbol table index {symtab_index} out of range",
                                offset=self.e_shoff)
        sh = self.sections[symtab_index]
        link = sh[6]
        if not 0 <= link < len(self.sections):
            raise ElfParseError(f"{self.name}: string table index {link} out of range",
                                offset=self.e_shoff)
        strtab = self.section_bytes(link)
        raw = self.section_bytes(symtab_index)
        entsize = sh[9] or _SYM.size
        names = []
        for off in range(0, len(raw) - _SYM.size + 1, entsize):
            st_name = _SYM.unpack_from(raw, off)[0]
            names.append(_cstring(strtab, st_name))
        self._symbols[symtab_index] = names
        return names

    def reference_counts(self) -> dict[str, int]:
        accepted = _REFERENCE_RELOC_TYPES.get(self.e_machine, _DEFAULT_RELOC_TYPES)
        counts: dict[str, int] = {}
        for index, sh in enumerate(self.sections):
            if sh[1] != SHT_RELA:
                continue
            raw = self.section_bytes(index)
            names = self.symbol_names(sh[6])
            entsize = sh[9] or _RELA.size
            for off in range(0, len(raw) - _RELA.size + 1, entsize):
                _r_offset, r_info, _addend = _RELA.unpack_from(raw, off)
                rtype = r_info & 0xFFFFFFFF
                if rtype not in accepted:
                    continue
                sym = r_info >> 32
                if sym >= len(names):
                    continue
                name = names[sym]
                if name:
                    counts[name] = counts.get(name, 0) + 1
        return counts


def is_elf(path: Union[str, Path]) -> bool:
    try:
        with open(path, "rb") as fh:
            return fh.read(4) == ELF_MAGIC
    except OSError:
        return False


def scan_elf(path: Union[str, Path]) -> ObjectRecord:
    """Count dynamic relocation references in one ELF64 little-endian file."""
    path = Path(path)
    data = path.read_bytes()
    elf = _ElfFile(data, str(path))
    return ObjectRecord(name=str(path), size_bits=len(data) * 8,
                        refs=elf.reference_counts())


def scan_text(path: Union[str, Path], strict: bool = False) -> ObjectRecord:
    """Ingest a tab-separated dump: ``object<TAB>symbol[<TAB>count]`` per line.

    Counts are aggregated across lines.  Malformed lines are logged with
    their line numbers and skipped, or abort immediately when ``strict``.
    """
    path = Path(path)
    raw = path.read_bytes()
    counts: dict[str, int] = {}
    object_names: dict[str, None] = {}
    for lineno, line in enumerate(raw.decode("utf-8", errors="replace").splitlines(), 1):
        if not line.strip():
            continue
        fields = line.split("\t")
        problem = None
        count = 1
        if len(fields) not in (2, 3) or not fields[0] or not fields[1]:
            problem = "expected object<TAB>symbol[<TAB>count]"
        elif len(fields) == 3:
            try:
                count = int(fields[2])
            except ValueError:
                problem = f"count {fields[2]!r} is not an integer"
            else:
                if count < 1:
                    problem = f"count {count} < 1"
        if problem is not None:
            message = f"{path}:{lineno}: {problem}"
            if strict:
                raise InputParseError(message)
            log.warning("skipping malformed line: %s", message)
            continue
        object_names.setdefault(fields[0])
        counts[fields[1]] = counts.get(fields[1], 0) + count
    names = list(object_names)
    name = names[0] if len(names) == 1 else str(path)
    return ObjectRecord(name=name, size_bits=max(len(raw) * 8, 1), refs=counts)


def build_corpus(records: Iterable[ObjectRecord]) -> Corpus:
    """Assemble records into a corpus with the deterministic rank assignment.

    The result is independent of the order in which records are supplied.
    """
    recs = sorted(records, key=lambda r: (r.name, r.size_bits, sorted(r.refs.items())))
    if not recs:
        raise ValidationError("corpus needs at least one object record")
    totals: dict[str, int] = {}
    for rec in recs:
        for sym, count in rec.refs.items():
            totals[sym] = totals.get(sym, 0) + count
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    index = {sym: rank for rank, (sym, _count) in enumerate(ranked, start=1)}
    return Corpus(objects=tuple(recs), component_index=index)


def save_corpus(corpus: Corpus, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for obj in corpus.objects:
            fh.write(json.dumps(
                {"object": obj.name, "size_bits": obj.size_bits, "refs": obj.refs},
                sort_keys=True))
            fh.write("\n")


def load_corpus(path: Union[str, Path]) -> Corpus:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputParseError(f"{path}: record {lineno}: invalid JSON ({exc})")
            if not isinstance(doc, dict):
                raise InputParseError(f"{path}: record {lineno}: not an object")
            try:
                name = doc["object"]
                size_bits = doc["size_bits"]
                refs = doc["refs"]
            except KeyError as exc:
                raise InputParseError(f"{path}: record {lineno}: missing field {exc}")
            if (not isinstance(name, str) or not isinstance(size_bits, int)
                    or not isinstance(refs, dict)
                    or any(not isinstance(k, str) or not isinstance(v, int)
                           for k, v in refs.items())):
                raise InputParseError(f"{path}: record {lineno}: malformed field types")
            try:
                records.append(ObjectRecord(name=name, size_bits=size_bits, refs=refs))
            except ValidationError as exc:
                raise InputParseError(f"{path}: record {lineno}: {exc}")
    if not records:
        return Corpus(objects=(), component_index={})
    return build_corpus(records)
