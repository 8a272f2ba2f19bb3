"""Template language: parser, interpreter and template banks"""
from src.dsl.bank import TemplateBank, load_bank, parse_bank, select_template
from src.dsl.interpreter import RenderContext, render
from src.dsl.nodes import TemplateProgram
from src.dsl.parser import parse_template

__all__ = [
    'TemplateBank', 'TemplateProgram', 'RenderContext',
    'parse_template', 'render', 'parse_bank', 'load_bank', 'select_template',
]
