"""
freeprod application factory.
Registers the JSON API blueprint; the computational services live in freeprod.services.
"""

import logging

from flask import Flask, jsonify

from .config import Config

__version__ = '1.0.0'

logger = logging.getLogger(__name__)


def create_app(config_class=Config):
    app = Flask(__name__)
    app.config.from_object(config_class)

    # Register blueprints
    from freeprod.routes.api import bp as api_bp
    app.register_blueprint(api_bp, url_prefix='/api')

    # Error handlers
    @app.errorhandler(404)
    def not_found_error(error):
        return jsonify({'success': False, 'error': 'Not found'}), 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        return jsonify({'success': False, 'error': 'Method not allowed'}), 405

    @app.errorhandler(500)
    def internal_error(error):
        return jsonify({'success': False, 'error': 'Internal server error'}), 500

    logger.info("freeprod %s API ready (budget %d)", __version__, app.config['MERGE_BUDGET'])
    return app
