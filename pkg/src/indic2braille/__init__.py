"""Translate text in ten Indic scripts to Bharti Braille.

A rule table does the first pass; characters the table marks as ambiguous are
resolved by a bidirectional LSTM tagger.
"""
from .braille import Cell, from_unicode, parse_dot_notation, to_brf, to_dot_notation, to_unicode
from .errors import BrailleError, DetectionFailure, MissingModel, TableError
from .evaluation import accuracy, evaluate
from .pipeline import translate_hybrid, translate_rule_only
from .rules import RuleTable, apply_rules, bundled_table, load_table, load_tables
from .script import Kind, Script, SourceToken, detect_script, segment
from .tagger import TaggerModel, TrainConfig, load_model, save_model, train

__version__ = "0.1.0"

__all__ = [
    "BrailleError", "Cell", "DetectionFailure", "Kind", "MissingModel", "RuleTable", "Script",
    "SourceToken", "TableError", "TaggerModel", "TrainConfig", "accuracy", "apply_rules",
    "bundled_table", "detect_script", "evaluate", "from_unicode", "load_model", "load_table",
    "load_tables", "parse_dot_notation", "save_model", "segment", "to_brf", "to_dot_notation",
    "to_unicode", "train", "translate_hybrid", "translate_rule_only",
]
