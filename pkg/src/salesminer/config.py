"""Effective configuration for pipelines, the CLI and the task service.

One TOML file (optional) feeds both `serve` and the batch subcommands;
environment variables override the service section, and CLI flags / task
request overrides take precedence over everything.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional

from .clustering import ClusteringConfig
from .errors import ConfigError
from .phrases import MiningConfig
from .scoring import Lexicons, ScorerConfig, load_lexicon

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ENV_PREFIX = "SALESMINER_"

# Flat override keys accepted in task requests and mapped onto EngineConfig.
ENGINE_OVERRIDE_KEYS = (
    "window",
    "answer_threshold",
    "per_label_threshold",
    "embedding_dim",
    "k",
    "relevance_threshold",
    "seed",
    "min_support",
    "significance_threshold",
    "max_phrase_len",
    "max_keywords",
)


@dataclass(frozen=True)
class EngineConfig:
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    faq_window: int = 6
    clustering: ClusteringConfig = field(default_factory=ClusteringConfig)
    mining: MiningConfig = field(default_factory=MiningConfig)
    seed: int = 0

    def to_doc(self) -> dict[str, Any]:
        """Deterministic snapshot of every value that affects results."""
        return {
            "scorer": {
                "backend": self.scorer.backend,
                "remote_url": self.scorer.remote_url,
                "per_label_threshold": self.scorer.per_label_threshold,
                "answer_threshold": self.scorer.answer_threshold,
                "embedding_dim": self.scorer.embedding_dim,
                "lexicons": {
                    "greetings": sorted(self.scorer.lexicons.greetings),
                    "interrogatives": sorted(self.scorer.lexicons.interrogatives),
                    "domain_terms": sorted(self.scorer.lexicons.domain_terms),
                },
            },
            "faq_window": self.faq_window,
            "clustering": {
                "k": self.clustering.k_override,
                "relevance_threshold": self.clustering.relevance_threshold,
                "min_tokens": self.clustering.min_tokens,
            },
            "mining": {
                "min_support": self.mining.min_support,
                "significance_threshold": self.mining.significance_threshold,
                "max_phrase_len": self.mining.max_phrase_len,
                "max_keywords": self.mining.max_keywords,
            },
            "seed": self.seed,
        }

    def with_overrides(self, overrides: Mapping[str, Any]) -> "EngineConfig":
        unknown = set(overrides) - set(ENGINE_OVERRIDE_KEYS)
        if unknown:
            raise ConfigError(f"unknown config overrides: {sorted(unknown)}")
        cfg = self
        o = dict(overrides)
        scorer_fields = {}
        for key in ("answer_threshold", "per_label_threshold", "embedding_dim"):
            if key in o:
                scorer_fields[key] = o.pop(key)
        if scorer_fields:
            cfg = replace(cfg, scorer=replace(cfg.scorer, **scorer_fields))
        if "window" in o:
            cfg = replace(cfg, faq_window=int(o.pop("window")))
        cluster_fields = {}
        if "k" in o:
            cluster_fields["k_override"] = _int_or_none(o.pop("k"))
        if "relevance_threshold" in o:
            cluster_fields["relevance_threshold"] = float(o.pop("relevance_threshold"))
        if cluster_fields:
            cfg = replace(cfg, clustering=replace(cfg.clustering, **cluster_fields))
        mining_fields = {}
        for key in ("min_support", "significance_threshold", "max_phrase_len", "max_keywords"):
            if key in o:
                mining_fields[key] = o.pop(key)
        if mining_fields:
            cfg = replace(cfg, mining=replace(cfg.mining, **mining_fields))
        if "seed" in o:
            cfg = replace(cfg, seed=int(o.pop("seed")))
        return cfg


def _int_or_none(value: Any) -> Optional[int]:
    if value in (None, 0, "0", ""):
        return None
    return int(value)


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "./data"
    cors_origins: tuple[str, ...] = ()
    max_upload_bytes: int = 64 * 1024 * 1024
    workers: int = 1
    rules_path: Optional[str] = None
    static_dir: Optional[str] = None
    engine: EngineConfig = field(default_factory=EngineConfig)


def _scorer_from_doc(doc: Mapping[str, Any]) -> ScorerConfig:
    lexicons = Lexicons()
    greetings_path = doc.get("greetings_path")
    interrogatives_path = doc.get("interrogatives_path")
    domain_terms_path = doc.get("domain_terms_path")
    if greetings_path:
        lexicons = replace(lexicons, greetings=load_lexicon(greetings_path))
    if interrogatives_path:
        lexicons = replace(lexicons, interrogatives=load_lexicon(interrogatives_path))
    if domain_terms_path:
        lexicons = replace(lexicons, domain_terms=load_lexicon(domain_terms_path))
    try:
        return ScorerConfig(
            backend=doc.get("backend", "baseline"),
            remote_url=doc.get("remote_url") or None,
            per_label_threshold=float(doc.get("per_label_threshold", 0.5)),
            answer_threshold=float(doc.get("answer_threshold", 0.75)),
            embedding_dim=int(doc.get("embedding_dim", 256)),
            lexicons=lexicons,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(
    path: Optional[str] = None, env: Mapping[str, str] = os.environ
) -> ServiceConfig:
    """Build the service configuration from a TOML file plus env overrides."""
    doc: dict[str, Any] = {}
    if path:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc

    service_doc = doc.get("service", {})
    scoring_doc = doc.get("scoring", {})
    faq_doc = doc.get("faq", {})
    clustering_doc = doc.get("clustering", {})
    mining_doc = doc.get("mining", {})
    sop_doc = doc.get("sop", {})

    listen = env.get(ENV_PREFIX + "LISTEN", service_doc.get("listen", "127.0.0.1:8000"))
    host, _, port_str = listen.rpartition(":")
    if not host or not port_str.isdigit():
        raise ConfigError(f"listen address must be host:port, got {listen!r}")

    if ENV_PREFIX + "SCORER_BACKEND" in env:
        scoring_doc = {**scoring_doc, "backend": env[ENV_PREFIX + "SCORER_BACKEND"]}
    if ENV_PREFIX + "REMOTE_URL" in env:
        scoring_doc = {**scoring_doc, "remote_url": env[ENV_PREFIX + "REMOTE_URL"]}

    engine = EngineConfig(
        scorer=_scorer_from_doc(scoring_doc),
        faq_window=int(faq_doc.get("window", 6)),
        clustering=ClusteringConfig(
            k_override=_int_or_none(clustering_doc.get("k")),
            relevance_threshold=float(clustering_doc.get("relevance_threshold", 0.6)),
        ),
        mining=MiningConfig(
            min_support=int(mining_doc.get("min_support", 3)),
            significance_threshold=float(mining_doc.get("significance_threshold", 2.0)),
            max_phrase_len=int(mining_doc.get("max_phrase_len", 6)),
            max_keywords=int(mining_doc.get("max_keywords", 5)),
        ),
        seed=int(doc.get("seed", 0)),
    )

    return ServiceConfig(
        host=host,
        port=int(port_str),
        data_dir=env.get(ENV_PREFIX + "DATA_DIR", service_doc.get("data_dir", "./data")),
        cors_origins=tuple(service_doc.get("cors_origins", [])),
        max_upload_bytes=int(service_doc.get("max_upload_bytes", 64 * 1024 * 1024)),
        workers=int(service_doc.get("workers", 1)),
        rules_path=env.get(ENV_PREFIX + "RULES_PATH", sop_doc.get("rules_path")) or None,
        static_dir=service_doc.get("static_dir") or None,
        engine=engine,
    )
