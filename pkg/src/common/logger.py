"""
Logger compartido por todos los modulos del proyecto.
"""

from ctrutils.handler.logging.logging_handler import LoggingHandler

# Instanciar manejador de logs
logging_handler = LoggingHandler()
stream = logging_handler.create_stream_handler()
logger = logging_handler.add_handlers([stream])
