#!/usr/bin/env python3
"""
cimbench - Problem instance resolution

Instances come from G-set text files, from the G-set mirror (downloaded once into
the cache directory) or from the seeded generators.

String references:
    path/to/file            G-set formatted file
    gset:g11                G-set graph by name
    complete:800[:seed]     K_n with +-1 weights
    random:100:0.1[:seed]   G(n, p) with unit weights
    torus:60x50[:seed]      toroidal grid with unit weights
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import requests

from config import GSET_REFERENCE, Config, GsetReference, URLs
from core.graph import (
    Graph,
    gen_complete_pm1,
    gen_random_graph,
    gen_toroidal_grid,
    load_gset,
)
from exceptions import CimBenchError, InstanceError, SpecError
from utils.logger import Logger

InstanceRef = Union[str, Dict[str, Any]]


@dataclass
class Instance:
    """A named graph together with what is known about its optimum"""

    name: str
    graph: Graph
    source: str
    u_sdp: Optional[float] = None
    reference: Optional[GsetReference] = None


def _reference_for(name: str) -> Optional[GsetReference]:
    return GSET_REFERENCE.get(name.lower())


class InstanceManager:
    """Turns instance references into graphs"""

    def __init__(self, logger: Logger, config: Config):
        self.logger = logger
        self.config = config
        self.session = requests.Session()
        self.session.headers.update({"User-Agent": "cimbench/1.0"})

    def resolve(self, ref: InstanceRef) -> List[Instance]:
        """One reference may expand to several instances (generator blocks with count)"""
        if isinstance(ref, dict):
            return self._resolve_block(ref)
        if not isinstance(ref, str) or not ref:
            raise SpecError(f"invalid instance reference: {ref!r}")

        kind, _, rest = ref.partition(":")
        if kind == "gset" and rest:
            return [self.load_gset_instance(rest)]
        if kind in ("complete", "random", "torus") and rest:
            return self._generate(self._parse_shorthand(kind, rest))
        return [self.load_file(Path(ref))]

    def load_file(self, path: Path, name: Optional[str] = None) -> Instance:
        if not path.is_file():
            raise InstanceError(f"instance file not found: {path}")
        self.logger.info(f"Loading {path}")
        graph = load_gset(path)
        name = name or path.stem
        reference = _reference_for(name)
        return Instance(
            name=name,
            graph=graph,
            source=str(path),
            u_sdp=reference.u_sdp if reference else None,
            reference=reference,
        )

    def load_gset_instance(self, name: str) -> Instance:
        path = self.fetch_gset(name)
        return self.load_file(path, name=name.lower())

    def gset_path(self, name: str) -> Path:
        return self.config.cache_dir / "gset" / name.upper()

    def fetch_gset(self, name: str) -> Path:
        """Download a G-set graph into the cache (skipped when already present)"""
        target = self.gset_path(name)
        if target.exists():
            self.logger.info(f"{target.name} already cached. Skipping download.")
            return target

        target.parent.mkdir(parents=True, exist_ok=True)
        url = f"{URLs.GSET_BASE}/{name.upper()}"
        self.logger.info(f"Downloading {url}")
        partial = target.with_suffix(".part")
        try:
            response = self.session.get(url, stream=True, timeout=30)
            response.raise_for_status()
            with partial.open("wb") as f:
                for chunk in response.iter_content(chunk_size=8192):
                    if chunk:
                        f.write(chunk)
        except requests.RequestException as e:
            partial.unlink(missing_ok=True)
            raise InstanceError(f"Failed to download {url}: {e}") from e

        partial.replace(target)
        self.logger.success(f"Downloaded {target.name}")
        return target

    # --- generator blocks ---------------------------------------------------

    def _resolve_block(self, block: Dict[str, Any]) -> List[Instance]:
        block = dict(block)
        u_sdp = block.pop("u_sdp", None)
        if "path" in block:
            instances = [self.load_file(Path(block["path"]), block.get("name"))]
        elif "gset" in block:
            instances = [self.load_gset_instance(str(block["gset"]))]
        elif "generator" in block:
            instances = self._generate(block)
        else:
            raise SpecError(f"instance block needs path, gset or generator: {block}")
        if u_sdp is not None:
            for instance in instances:
                instance.u_sdp = float(u_sdp)
        return instances

    @staticmethod
    def _parse_shorthand(kind: str, rest: str) -> Dict[str, Any]:
        parts = rest.split(":")
        try:
            if kind == "complete":
                block = {"generator": "complete-pm1", "n": int(parts[0])}
                extra = parts[1:]
            elif kind == "random":
                block = {
                    "generator": "random",
                    "n": int(parts[0]),
                    "density": float(parts[1]),
                }
                extra = parts[2:]
            else:
                rows, _, cols = parts[0].partition("x")
                block = {"generator": "torus", "rows": int(rows), "cols": int(cols)}
                extra = parts[1:]
            if extra:
                block["seed"] = int(extra[0])
        except (ValueError, IndexError) as e:
            raise SpecError(f"malformed instance reference '{kind}:{rest}'") from e
        return block

    def _generate(self, block: Dict[str, Any]) -> List[Instance]:
        kind = block.get("generator")
        seed = int(block.get("seed", 0))
        count = int(block.get("count", 1))
        weights = block.get("weights", "unit")
        if count < 1:
            raise SpecError(f"generator count must be >= 1, got {count}")

        instances = []
        try:
            for k in range(count):
                s = seed + k
                if kind == "complete-pm1":
                    n = int(block["n"])
                    graph, name = gen_complete_pm1(n, s), f"K{n}_s{s}"
                elif kind == "random":
                    n, density = int(block["n"]), float(block["density"])
                    graph = gen_random_graph(n, density, s, weights)
                    name = f"R{n}_p{density:g}_{weights}_s{s}"
                elif kind == "torus":
                    rows, cols = int(block["rows"]), int(block["cols"])
                    graph = gen_toroidal_grid(rows, cols, s, weights)
                    name = f"T{rows}x{cols}_{weights}_s{s}"
                else:
                    raise SpecError(
                        f"unknown generator {kind!r} (complete-pm1, random, torus)"
                    )
                if count == 1 and block.get("name"):
                    name = block["name"]
                self.logger.debug(f"Generated {name}: {graph}")
                instances.append(Instance(name=name, graph=graph, source=f"generator:{kind}"))
        except KeyError as e:
            raise SpecError(f"generator {kind!r} is missing field {e}") from e
        except SpecError:
            raise
        except CimBenchError as e:
            raise SpecError(f"generator {kind!r}: {e}") from e
        return instances
